#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "nxs/app/commands.hpp"
#include "nxs/error.hpp"

namespace nxs::app {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!(lo <= hi)) lo = 0.0, hi = 1.0;
    if (lo == hi) lo -= 0.5, hi += 0.5;
  }
};

}  // namespace

std::string render_svg(const io::CsvTable& table, const std::vector<std::string>& channels, double width,
                       double height) {
  const auto tcol = table.column("time");
  if (!tcol) throw Error(Errc::schema_error, "CSV has no 'time' column");
  std::vector<std::size_t> cols;
  for (const auto& ch : channels) {
    const auto c = table.column(ch);
    if (!c) throw Error(Errc::unknown_channel, "no column '" + ch + "'");
    cols.push_back(*c);
  }

  std::vector<double> t;
  std::vector<std::vector<double>> y(cols.size());
  Range tx, vy;
  for (const auto& row : table.rows) {
    t.push_back(io::parse_double(row[*tcol]));
    tx.add(t.back());
    for (std::size_t k = 0; k < cols.size(); ++k) {
      y[k].push_back(io::parse_double(row[cols[k]]));
      vy.add(y[k].back());
    }
  }
  tx.settle();
  vy.settle();

  const double ml = 70, mr = 20, mt = 20, mb = 50;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto px = [&](double v) { return ml + (v - tx.lo) / (tx.hi - tx.lo) * pw; };
  auto py = [&](double v) { return mt + (1.0 - (v - vy.lo) / (vy.hi - vy.lo)) * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  svg += fmt::format("<g stroke=\"black\" stroke-width=\"1\"><line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\"/>"
                     "<line x1=\"{0}\" y1=\"{3}\" x2=\"{0}\" y2=\"{1}\"/></g>\n",
                     ml, mt + ph, ml + pw, mt);
  svg += fmt::format("<g font-family=\"sans-serif\" font-size=\"12\">\n"
                     "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">time (s)</text>\n"
                     "<text x=\"15\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 15 {})\">value</text>\n"
                     "<text x=\"{}\" y=\"{}\">{:.6g}</text><text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.6g}</text>\n"
                     "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.6g}</text>"
                     "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{:.6g}</text>\n</g>\n",
                     ml + pw / 2, height - 10, mt + ph / 2, mt + ph / 2, ml, mt + ph + 18, tx.lo, ml + pw,
                     mt + ph + 18, tx.hi, ml - 6, mt + ph, vy.lo, ml - 6, mt + 10, vy.hi);

  for (std::size_t k = 0; k < cols.size(); ++k) {
    std::string points;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!std::isfinite(t[i]) || !std::isfinite(y[k][i])) continue;
      if (!points.empty()) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", px(t[i]), py(y[k][i]));
    }
    svg += fmt::format("<polyline data-channel=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1\" points=\"{}\"/>\n",
                       escape(channels[k]), kPalette[k % std::size(kPalette)], points);
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace nxs::app
