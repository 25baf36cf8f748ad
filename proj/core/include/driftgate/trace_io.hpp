#pragma once

#include <string>
#include <vector>

#include "driftgate/harness.hpp"
#include "driftgate/validation.hpp"

namespace driftgate {

// CSV emitters for the trace types. All numbers use shortest round-trip
// formatting so identical runs produce identical bytes.
void write_metrics_csv(const RunTrace& trace, const std::string& path);
void write_checkpoints_csv(const RunTrace& trace, const std::string& path);
void write_tests_csv(const CompareTrace& trace, const std::string& path);
void write_compare_csv(const CompareTrace& trace, const std::string& path);
void write_validity_csv(const ValidityTrace& trace, const std::string& path);
void write_sweep_csv(const SweepTable& table, const std::string& path);
void write_errors_csv(const ErrorRateReport& report, const std::string& path);
void write_resample_csv(const std::vector<ResampleRow>& rows,
                        const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
  std::vector<double> numeric_column(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace driftgate
