#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hgas/configuration.hpp"
#include "hgas/energy.hpp"
#include "hgas/equilibrium.hpp"
#include "hgas/minimizer.hpp"
#include "hgas/stats.hpp"

namespace hgas {

/// Numeric table with `# key=value` header lines.
struct CsvTable {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }
  void add_meta(std::string key, double value);
  std::string meta_value(const std::string& key) const;  ///< "" when absent
  std::vector<double> column(const std::string& name) const;
};

/// Doubles are written with 17 significant digits so files round-trip exactly.
void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);
std::string format_double(double v);

enum class CheckpointFormat { csv, binary };

/// Rows (q, x_1..x_d). The binary form is "HGAS", u32 version, u64 n, u32 d,
/// then q[n] and the axis-major coordinates as little-endian doubles.
void write_checkpoint(const std::string& path, const Configuration& config, CheckpointFormat format,
                      const std::vector<std::pair<std::string, std::string>>& meta = {});
/// Format detected from the magic bytes.
Configuration read_checkpoint(const std::string& path);

CsvTable trace_table(const std::vector<TraceRow>& trace);
CsvTable profile_table(const EquilibriumProfile& profile, std::size_t points = 2048);
CsvTable shell_table(const ShellLayout& layout);
CsvTable radial_table(const RadialHistogram& h);
CsvTable histogram_table(const Histogram& h, const std::string& value_name);
CsvTable correlation_table(const CorrelationCurve& c);

std::string to_json(const SplitBreakdown& s);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace hgas
