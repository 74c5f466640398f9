// SVG chart writer: success probability vs rho, one polyline per system size.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <vector>

#include "csbp/sweep.hpp"

namespace csbp {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void emit_chart(const SweepTable& table, const std::string& path) {
  if (table.aggregates.empty()) throw std::invalid_argument("emit_chart: empty table");

  std::map<int, std::vector<const AggregateRow*>> by_n;
  double rho_min = table.aggregates.front().rho, rho_max = rho_min;
  for (const AggregateRow& r : table.aggregates) {
    by_n[r.n].push_back(&r);
    rho_min = std::min(rho_min, r.rho);
    rho_max = std::max(rho_max, r.rho);
  }
  if (rho_max - rho_min < 1e-12) {
    rho_min -= 0.01;
    rho_max += 0.01;
  }
  for (auto& [n, rows] : by_n)
    std::sort(rows.begin(), rows.end(),
              [](const AggregateRow* a, const AggregateRow* b) { return a->rho < b->rho; });

  const double width = 640, height = 480;
  const double left = 70, right = 20, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;
  auto sx = [&](double rho) { return left + pw * (rho - rho_min) / (rho_max - rho_min); };
  auto sy = [&](double p) { return top + ph * (1.0 - p); };

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">success probability vs rho ("
      << solver_name(table.aggregates.front().solver) << ", alpha=" << num(table.aggregates.front().alpha)
      << ")</text>\n";

  // axes and ticks
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\""
      << top + ph << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double rho = rho_min + (rho_max - rho_min) * t / 5.0;
    const double p = t / 5.0;
    out << "<line x1=\"" << sx(rho) << "\" y1=\"" << top + ph << "\" x2=\"" << sx(rho) << "\" y2=\""
        << top + ph + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << sx(rho) << "\" y=\"" << top + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << num(rho)
        << "</text>\n"
        << "<line x1=\"" << left - 5 << "\" y1=\"" << sy(p) << "\" x2=\"" << left << "\" y2=\"" << sy(p)
        << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << left - 10 << "\" y=\"" << sy(p) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << num(p)
        << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">rho</text>\n"
      << "<text x=\"18\" y=\"" << top + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">P(success)</text>\n";

  int color = 0;
  double legend_y = top + 10;
  for (const auto& [n, rows] : by_n) {
    const char* stroke = kPalette[color % 6];
    out << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (const AggregateRow* r : rows) out << num(sx(r->rho)) << ',' << num(sy(r->p_success)) << ' ';
    out << "\"/>\n";
    for (const AggregateRow* r : rows)
      out << "<circle cx=\"" << num(sx(r->rho)) << "\" cy=\"" << num(sy(r->p_success))
          << "\" r=\"3\" fill=\"" << stroke << "\"/>\n";
    out << "<text x=\"" << left + pw - 8 << "\" y=\"" << legend_y
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" << stroke
        << "\">n=" << n << "</text>\n";
    legend_y += 16;
    ++color;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace csbp
