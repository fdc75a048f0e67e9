#include "hgas/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hgas/error.hpp"

namespace hgas {
namespace {

constexpr char magic[4] = {'H', 'G', 'A', 'S'};
constexpr std::uint32_t checkpoint_version = 1;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  const std::string t = trim(s);
  if (t == "nan" || t == "NaN") return NAN;
  if (t == "inf") return INFINITY;
  if (t == "-inf") return -INFINITY;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw Error(Errc::io, "not a number: '" + t + "'");
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  static_assert(std::endian::native == std::endian::little, "checkpoints assume a little-endian host");
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& in) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error(Errc::io, "truncated checkpoint");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void CsvTable::add_meta(std::string key, double value) { add_meta(std::move(key), format_double(value)); }

std::string CsvTable::meta_value(const std::string& key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return "";
}

std::vector<double> CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (columns[c] == name) {
      std::vector<double> out;
      for (const auto& r : rows) out.push_back(r[c]);
      return out;
    }
  throw Error(Errc::io, "no column named " + name);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot write " + path);
  out << text;
  if (!out) throw Error(Errc::io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ostringstream out;
  for (const auto& [k, v] : t.meta) out << "# " << k << '=' << v << '\n';
  for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& r : t.rows) {
    if (r.size() != t.columns.size()) throw Error(Errc::io, "row width differs from the header");
    for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_double(r[c]);
    out << '\n';
  }
  write_text(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  CsvTable t;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      const auto eq = body.find('=');
      if (eq != std::string::npos) t.add_meta(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
      continue;
    }
    const auto cells = split(line, ',');
    if (!header) {
      for (const auto& c : cells) t.columns.push_back(trim(c));
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size()) throw Error(Errc::io, path + ": row width differs from the header");
    std::vector<double> row;
    for (const auto& c : cells) row.push_back(parse_double(c));
    t.rows.push_back(std::move(row));
  }
  if (!header) throw Error(Errc::io, path + ": missing header row");
  return t;
}

void write_checkpoint(const std::string& path, const Configuration& c, CheckpointFormat format,
                      const std::vector<std::pair<std::string, std::string>>& meta) {
  const std::size_t n = c.size();
  const int d = c.dim();
  if (format == CheckpointFormat::binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io, "cannot write " + path);
    out.write(magic, 4);
    put<std::uint32_t>(out, checkpoint_version);
    put<std::uint64_t>(out, n);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(d));
    for (double q : c.charges()) put(out, q);
    for (double x : c.coords()) put(out, x);
    if (!out) throw Error(Errc::io, "write failed for " + path);
    return;
  }
  CsvTable t;
  t.meta = meta;
  t.add_meta("dimension", std::to_string(d));
  if (!c.manifold_tag().empty()) t.add_meta("manifold", c.manifold_tag());
  t.columns.push_back("q");
  for (int k = 0; k < d; ++k) t.columns.push_back("x" + std::to_string(k + 1));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row{c.charges()[i]};
    for (int k = 0; k < d; ++k) row.push_back(c.coord(i, k));
    t.rows.push_back(std::move(row));
  }
  write_csv(path, t);
}

Configuration read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path);
  char head[4] = {};
  in.read(head, 4);
  if (in.gcount() == 4 && std::memcmp(head, magic, 4) == 0) {
    if (get<std::uint32_t>(in) != checkpoint_version) throw Error(Errc::io, "unsupported checkpoint version");
    const auto n = get<std::uint64_t>(in);
    const auto d = static_cast<int>(get<std::uint32_t>(in));
    if (d < 1 || d > 64 || n > (std::uint64_t{1} << 32)) throw Error(Errc::io, "corrupt checkpoint header");
    std::vector<double> q(n), x(n * d);
    for (auto& v : q) v = get<double>(in);
    for (auto& v : x) v = get<double>(in);
    return Configuration(d, std::move(x), std::move(q));
  }
  const auto t = read_csv(path);
  if (t.columns.size() < 2 || t.columns[0] != "q") throw Error(Errc::io, path + ": expected columns q,x1,..");
  const int d = static_cast<int>(t.columns.size()) - 1;
  const std::size_t n = t.rows.size();
  std::vector<double> q(n), x(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = t.rows[i][0];
    for (int k = 0; k < d; ++k) x[k * n + i] = t.rows[i][k + 1];
  }
  Configuration c(d, std::move(x), std::move(q));
  if (auto m = t.meta_value("manifold"); !m.empty()) c.set_manifold_tag(m);
  return c;
}

CsvTable trace_table(const std::vector<TraceRow>& trace) {
  CsvTable t;
  t.columns = {"step", "energy", "residual", "beta"};
  for (const auto& r : trace) t.rows.push_back({static_cast<double>(r.step), r.energy, r.residual, r.beta});
  return t;
}

CsvTable profile_table(const EquilibriumProfile& p, std::size_t points) {
  const auto tab = p.tabulate(points);
  CsvTable t;
  t.add_meta("support_radius", p.support_radius);
  t.add_meta("order", to_string(p.order));
  t.add_meta("mean_charge", p.mean_charge);
  t.columns = {"r", "rho", "rho_q", "q_of_r"};
  for (std::size_t k = 0; k < tab.r.size(); ++k) t.rows.push_back({tab.r[k], tab.rho[k], tab.rho_q[k], tab.q[k]});
  return t;
}

CsvTable shell_table(const ShellLayout& L) {
  CsvTable t;
  t.add_meta("dimension", std::to_string(L.dimension));
  t.columns = {"charge", "fraction", "inner_radius", "outer_radius", "density"};
  for (const auto& s : L.shells) t.rows.push_back({s.charge, s.fraction, s.inner_radius, s.outer_radius, s.density});
  return t;
}

CsvTable radial_table(const RadialHistogram& h) {
  CsvTable t;
  t.add_meta("replicas", std::to_string(h.replicas));
  t.add_meta("dimension", std::to_string(h.dimension));
  t.columns = {"r_lo", "r_hi", "r_mid", "rho", "rho_se", "rho_q", "rho_q_se", "mean_charge", "mean_charge_se", "count"};
  for (std::size_t b = 0; b + 1 < h.edges.size(); ++b)
    t.rows.push_back({h.edges[b], h.edges[b + 1], h.center(b), h.rho[b], h.rho_se[b], h.rho_q[b], h.rho_q_se[b],
                      h.mean_charge[b], h.mean_charge_se[b], static_cast<double>(h.counts[b])});
  return t;
}

CsvTable histogram_table(const Histogram& h, const std::string& value_name) {
  CsvTable t;
  t.columns = {value_name + "_lo", value_name + "_hi", "count", "density"};
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    t.rows.push_back({h.edges[b], h.edges[b + 1], static_cast<double>(h.counts[b]), h.density[b]});
  return t;
}

CsvTable correlation_table(const CorrelationCurve& c) {
  CsvTable t;
  t.add_meta("r0", c.r0);
  t.add_meta("width", c.width);
  t.add_meta("normalization", c.normalization);
  t.add_meta("replicas", std::to_string(c.replicas));
  t.add_meta("references", std::to_string(c.references));
  t.columns = {"r_lo", "r_hi", "r_mid", "G", "se"};
  for (std::size_t b = 0; b < c.g.size(); ++b) t.rows.push_back({c.edges[b], c.edges[b + 1], c.center(b), c.g[b], c.se[b]});
  return t;
}

std::string to_json(const SplitBreakdown& s) {
  nlohmann::ordered_json j;
  j["n"] = s.n;
  j["leading"] = s.leading;
  j["zeta_term"] = s.zeta_term;
  j["marginal_correction"] = s.marginal_correction;
  j["quadratic_remainder"] = s.quadratic_remainder;
  j["total_check"] = s.total_check;
  j["identity_residual"] = s.identity_residual;
  j["nlogn_coefficient"] = s.nlogn_coefficient;
  j["intensive_energy"] = s.h;
  j["interaction_integral"] = s.interaction;
  j["quadrature_tolerance"] = s.quadrature_tolerance;
  return j.dump(2) + "\n";
}

}  // namespace hgas
