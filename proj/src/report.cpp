#include "sodta/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

namespace sodta {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// 1, 2, 5 steps
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string fixed(double v, int digits = 2) {
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, digits);
  if (ec != std::errc()) return "0";
  return std::string(buf.data(), end);
}

std::string tick_label(double v) {
  if (std::abs(v) < 1e-12) return "0";
  if (std::abs(v) >= 1e5 || std::abs(v) < 1e-3) {
    std::array<char, 64> buf;
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::scientific, 2);
    return std::string(buf.data(), end);
  }
  return format_double(std::round(v * 1e6) / 1e6);
}

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                                  "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string format_double(double value) {
  std::array<char, 64> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format number");
  return std::string(buf.data(), end);
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << "iter,subproblem,objective,disagreement,wall_ms\n";
  for (const auto& r : rows) {
    out << r.iter << ',' << r.subproblem << ',' << format_double(r.objective) << ','
        << format_double(r.disagreement) << ',' << format_double(r.wall_ms) << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  auto out = open_out(path);
  write_trace_csv(out, rows);
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "demand,approach,objective_hr,gap_pct,runtime_s,iterations\n";
  for (const auto& r : rows) {
    out << csv_field(r.demand) << ',' << csv_field(r.approach) << ',' << format_double(r.objective_hr) << ','
        << (r.gap_pct ? fixed(*r.gap_pct) : std::string()) << ',' << format_double(r.runtime_s) << ','
        << r.iterations << '\n';
  }
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  auto out = open_out(path);
  write_summary_csv(out, rows);
}

void write_solution_csv(std::ostream& out, const Network& net, const VariableLayout& layout,
                        std::span<const double> values, double zero_tol) {
  if (values.size() != layout.size()) throw std::invalid_argument("solution does not match the layout");
  out << "var,cell,next,t,od,value\n";
  for (std::size_t g = 0; g < values.size(); ++g) {
    if (std::abs(values[g]) <= zero_tol) continue;
    const auto c = layout.decode(g);
    if (c.kind == VarKind::Occupancy) {
      out << "x," << net.external_id(c.entity) << ",," << c.t << ',' << c.od << ',' << format_double(values[g])
          << '\n';
    } else {
      const auto& lk = net.link(c.entity);
      out << "y," << net.external_id(lk.tail) << ',' << net.external_id(lk.head) << ',' << c.t << ',' << c.od
          << ',' << format_double(values[g]) << '\n';
    }
  }
}

void write_solution_csv(const std::filesystem::path& path, const Network& net, const VariableLayout& layout,
                        std::span<const double> values, double zero_tol) {
  auto out = open_out(path);
  write_solution_csv(out, net, layout, values, zero_tol);
}

void write_svg(std::ostream& out, const LinePlot& plot) {
  constexpr double W = 720, H = 440, left = 80, right = 150, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size()) throw std::invalid_argument("plot series with mismatched lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (plot.reference && std::isfinite(*plot.reference)) {
    ymin = std::min(ymin, *plot.reference);
    ymax = std::max(ymax, *plot.reference);
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
  if (!std::isfinite(ymin)) ymin = 0, ymax = 1;
  if (xmax - xmin < 1e-12) xmax = xmin + 1;
  if (ymax - ymin < 1e-12) {
    const double pad = std::max(1.0, std::abs(ymin) * 0.05);
    ymin -= pad;
    ymax += pad;
  }
  const double ystep = nice_step(ymax - ymin, 6);
  ymin = std::floor(ymin / ystep) * ystep;
  ymax = std::ceil(ymax / ystep) * ystep;
  const double xstep = nice_step(xmax - xmin, 8);

  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + (ymax - y) / (ymax - ymin) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(plot.title)
      << "</text>\n";

  for (double y = ymin; y <= ymax + ystep * 1e-6; y += ystep) {
    out << "<line x1=\"" << fixed(left) << "\" x2=\"" << fixed(left + pw) << "\" y1=\"" << fixed(py(y))
        << "\" y2=\"" << fixed(py(y)) << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(py(y) + 4) << "\" text-anchor=\"end\">"
        << tick_label(y) << "</text>\n";
  }
  for (double x = std::ceil(xmin / xstep) * xstep; x <= xmax + xstep * 1e-6; x += xstep) {
    out << "<line x1=\"" << fixed(px(x)) << "\" x2=\"" << fixed(px(x)) << "\" y1=\"" << fixed(top + ph)
        << "\" y2=\"" << fixed(top + ph + 5) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fixed(px(x)) << "\" y=\"" << fixed(top + ph + 18) << "\" text-anchor=\"middle\">"
        << tick_label(x) << "</text>\n";
  }
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
      << xml_escape(plot.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << fixed(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << xml_escape(plot.y_label) << "</text>\n";

  double legend_y = top + 10;
  auto legend = [&](const std::string& label, const char* color, bool dashed) {
    out << "<line x1=\"" << fixed(left + pw + 10) << "\" x2=\"" << fixed(left + pw + 34) << "\" y1=\""
        << fixed(legend_y) << "\" y2=\"" << fixed(legend_y) << "\" stroke=\"" << color << "\" stroke-width=\"2\""
        << (dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    out << "<text x=\"" << fixed(left + pw + 40) << "\" y=\"" << fixed(legend_y + 4) << "\">" << xml_escape(label)
        << "</text>\n";
    legend_y += 18;
  };

  for (std::size_t i = 0; i < plot.series.size(); ++i) {
    const auto& s = plot.series[i];
    const char* color = kPalette[i % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (!std::isfinite(s.x[j]) || !std::isfinite(s.y[j])) continue;
      out << fixed(px(s.x[j])) << ',' << fixed(py(s.y[j])) << ' ';
    }
    out << "\"/>\n";
    legend(s.label, color, false);
  }
  if (plot.reference && std::isfinite(*plot.reference)) {
    out << "<line x1=\"" << fixed(left) << "\" x2=\"" << fixed(left + pw) << "\" y1=\"" << fixed(py(*plot.reference))
        << "\" y2=\"" << fixed(py(*plot.reference)) << "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    legend(plot.reference_label, "black", true);
  }
  out << "</svg>\n";
}

void write_svg(const std::filesystem::path& path, const LinePlot& plot) {
  auto out = open_out(path);
  write_svg(out, plot);
}

LinePlot objective_plot(const RunTrace& trace, std::optional<double> oracle) {
  LinePlot p;
  p.title = "Objective over iterations";
  p.x_label = "iteration";
  p.y_label = "objective";
  PlotSeries s;
  s.label = "DGA";
  for (std::size_t i = 0; i < trace.total_objective.size(); ++i) {
    s.x.push_back(static_cast<double>(i + 1));
    s.y.push_back(trace.total_objective[i]);
  }
  p.series.push_back(std::move(s));
  p.reference = oracle;
  p.reference_label = "optimal";
  return p;
}

LinePlot disagreement_plot(const RunTrace& trace, double epsilon) {
  LinePlot p;
  p.title = "Disagreement over iterations";
  p.x_label = "iteration";
  p.y_label = "disagreement";
  std::map<int, PlotSeries> by_sub;
  for (const auto& r : trace.rows) {
    auto& s = by_sub[r.subproblem];
    s.label = "sub-problem " + std::to_string(r.subproblem);
    s.x.push_back(static_cast<double>(r.iter));
    s.y.push_back(r.disagreement);
  }
  for (auto& [_, s] : by_sub) p.series.push_back(std::move(s));
  p.reference = epsilon;
  p.reference_label = "epsilon";
  return p;
}

}  // namespace sodta
