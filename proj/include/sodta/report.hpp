#ifndef SODTA_REPORT_HPP_
#define SODTA_REPORT_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sodta/dga.hpp"
#include "sodta/layout.hpp"
#include "sodta/network.hpp"

namespace sodta {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);

struct SummaryRow {
  std::string demand;
  std::string approach;
  double objective_hr = 0.0;
  std::optional<double> gap_pct;
  double runtime_s = 0.0;
  std::size_t iterations = 0;
};

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

/// Nonzero entries of a central-layout point as
/// var,cell,next,t,od,value with external cell ids; next is empty for x.
void write_solution_csv(std::ostream& out, const Network& network, const VariableLayout& layout,
                        std::span<const double> values, double zero_tol = 1e-12);
void write_solution_csv(const std::filesystem::path& path, const Network& network, const VariableLayout& layout,
                        std::span<const double> values, double zero_tol = 1e-12);

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct LinePlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
  std::optional<double> reference;  // horizontal line
  std::string reference_label;
};

void write_svg(std::ostream& out, const LinePlot& plot);
void write_svg(const std::filesystem::path& path, const LinePlot& plot);

/// Sum of sub-problem objectives against iteration, with an optional oracle line.
LinePlot objective_plot(const RunTrace& trace, std::optional<double> oracle);
/// One disagreement series per sub-problem, with epsilon as the reference.
LinePlot disagreement_plot(const RunTrace& trace, double epsilon);

}  // namespace sodta

#endif  // SODTA_REPORT_HPP_
