#include "driftgate/trace_io.hpp"

#include <fstream>
#include <sstream>

#include "driftgate/error.hpp"
#include "driftgate/format.hpp"

namespace driftgate {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::io_error, "cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) raise(ErrorKind::io_error, "write failed for " + path);
}

}  // namespace

void write_metrics_csv(const RunTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "commit_index,sim_time,fold,r0,r1,fpr,gmean,defined_mask\n";
  for (const EvalEvent& e : trace.events) {
    out << format_int(e.commit_index) << ',' << format_int(e.sim_time) << ','
        << format_int(e.fold) << ',' << format_double(e.metrics.r0) << ','
        << format_double(e.metrics.r1) << ',' << format_double(e.metrics.fpr)
        << ',' << format_double(e.metrics.gmean) << ','
        << format_int(e.metrics.defined_mask()) << '\n';
  }
  finish(out, path);
}

void write_checkpoints_csv(const RunTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "commit_index,fold,gmean\n";
  for (const CheckpointRow& row : trace.checkpoints) {
    for (std::size_t f = 0; f < row.fold_gmean.size(); ++f) {
      out << format_int(row.commit_index) << ','
          << format_int(static_cast<std::int64_t>(f)) << ','
          << format_double(row.fold_gmean[f]) << '\n';
    }
  }
  finish(out, path);
}

void write_tests_csv(const CompareTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "commit_index,test,statistic,p_value,reject,direction\n";
  for (const ComparePoint& p : trace.points) {
    out << format_int(p.commit_index) << ',' << to_string(p.wilcoxon.test)
        << ',' << format_double(p.wilcoxon.statistic) << ','
        << format_double(p.wilcoxon.p_value) << ','
        << format_int(p.wilcoxon.reject ? 1 : 0) << ','
        << format_int(p.wilcoxon.direction) << '\n';
  }
  finish(out, path);
}

void write_compare_csv(const CompareTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "commit_index,gmean_a,gmean_b\n";
  for (const ComparePoint& p : trace.points) {
    out << format_int(p.commit_index) << ',' << format_double(p.mean_a) << ','
        << format_double(p.mean_b) << '\n';
  }
  finish(out, path);
}

void write_validity_csv(const ValidityTrace& trace, const std::string& path) {
  auto out = open_out(path);
  out << "commit_index,e_ideal,e_nonideal,v\n";
  for (const ValidityPoint& p : trace.points) {
    out << format_int(p.commit_index) << ',' << format_double(p.e_ideal) << ','
        << format_double(p.e_nonideal) << ',' << format_double(p.v) << '\n';
  }
  finish(out, path);
}

void write_sweep_csv(const SweepTable& table, const std::string& path) {
  auto out = open_out(path);
  out << "axis,days,final_v\n";
  for (const SweepRow& row : table.rows) {
    out << to_string(table.varied) << ',' << format_double(row.days) << ','
        << format_double(row.final_v) << '\n';
  }
  finish(out, path);
}

void write_errors_csv(const ErrorRateReport& report, const std::string& path) {
  auto out = open_out(path);
  out << "test,type_i,type_ii_n005,type_ii_n010,reps,stderr_i,stderr_ii005,"
         "stderr_ii010\n";
  auto row = [&](const TestErrorRates& r) {
    const double t2a = 1.0 - r.reject_noise_a;
    const double t2b = 1.0 - r.reject_noise_b;
    out << to_string(r.test) << ',' << format_double(r.reject_nochange) << ','
        << format_double(t2a) << ',' << format_double(t2b) << ','
        << format_int(r.trials) << ','
        << format_double(rate_stderr(r.reject_nochange, r.trials)) << ','
        << format_double(rate_stderr(t2a, r.trials)) << ','
        << format_double(rate_stderr(t2b, r.trials)) << '\n';
  };
  row(report.mcnemar);
  row(report.wilcoxon);
  row(report.sign);
  finish(out, path);
}

void write_resample_csv(const std::vector<ResampleRow>& rows,
                        const std::string& path) {
  auto out = open_out(path);
  out << "config,r1,fpr,gmean\n";
  for (const ResampleRow& row : rows) {
    out << row.config << ',' << format_double(row.r1) << ','
        << format_double(row.fpr) << ',' << format_double(row.gmean) << '\n';
  }
  finish(out, path);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const int idx = column(name);
  if (idx < 0) raise(ErrorKind::missing_column, "no csv column '" + name + "'");
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double v = 0.0;
    if (!parse_double(rows[r][static_cast<std::size_t>(idx)], v))
      raise(ErrorKind::bad_field, "non-numeric value in column '" + name + "'",
            static_cast<std::int64_t>(r + 1));
    values.push_back(v);
  }
  return values;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::io_error, "cannot open " + path);
  CsvTable table;
  std::string line;
  std::int64_t row_number = 0;
  auto split = [](const std::string& text) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(text);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!text.empty() && text.back() == ',') fields.emplace_back();
    return fields;
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (table.header.empty()) {
      table.header = split(line);
      continue;
    }
    ++row_number;
    auto fields = split(line);
    if (fields.size() != table.header.size())
      raise(ErrorKind::bad_field, "expected " +
                std::to_string(table.header.size()) + " fields, got " +
                std::to_string(fields.size()),
            row_number);
    table.rows.push_back(std::move(fields));
  }
  if (table.header.empty())
    raise(ErrorKind::empty_result, "empty csv file " + path);
  return table;
}

}  // namespace driftgate
