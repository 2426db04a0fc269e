#include "nlfb/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <stdexcept>

namespace nlfb {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("io: cannot open " + path);
  return out;
}

const char* kind_name(ExteriorSide::Kind k) {
  switch (k) {
    case ExteriorSide::Kind::Zero: return "zero";
    case ExteriorSide::Kind::Constant: return "constant";
    case ExteriorSide::Kind::Power: return "power";
    case ExteriorSide::Kind::Sampled: return "sampled";
  }
  return "zero";
}

json side_json(const ExteriorSide& s) {
  json j;
  j["kind"] = kind_name(s.kind);
  switch (s.kind) {
    case ExteriorSide::Kind::Zero:
      break;
    case ExteriorSide::Kind::Constant:
      j["value"] = s.value;
      break;
    case ExteriorSide::Kind::Sampled:
      j["xs"] = s.xs;
      j["values"] = s.vals;
      [[fallthrough]];
    case ExteriorSide::Kind::Power:
      j["amplitude"] = s.amplitude;
      j["exponent"] = s.exponent;
      break;
  }
  return j;
}

// Fixed viewport; data mapped affinely, y axis grows upward.
struct Frame {
  double xmin, xmax, ymin, ymax;
  static constexpr double W = 640, H = 420, pad = 48;

  double px(double x) const {
    return pad + (x - xmin) / (xmax - xmin) * (W - 2 * pad);
  }
  double py(double y) const {
    return H - pad - (y - ymin) / (ymax - ymin) * (H - 2 * pad);
  }
};

void svg_open(std::ofstream& out, const std::string& title, const Frame& f) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << Frame::W
      << "\" height=\"" << Frame::H << "\" viewBox=\"0 0 " << Frame::W << " "
      << Frame::H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << Frame::W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">"
      << title << "</text>\n";
  out << "<rect x=\"" << Frame::pad << "\" y=\"" << Frame::pad << "\" width=\""
      << Frame::W - 2 * Frame::pad << "\" height=\"" << Frame::H - 2 * Frame::pad
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.0f\" y=\"%.0f\" font-family=\"sans-serif\" "
                "font-size=\"11\">[%g, %g] x [%g, %g]</text>\n",
                Frame::pad, Frame::H - 12, f.xmin, f.xmax, f.ymin, f.ymax);
  out << buf;
}

void svg_polyline(std::ofstream& out, const Frame& f,
                  const std::vector<std::pair<double, double>>& pts,
                  const char* color, bool markers) {
  if (markers) {
    for (auto& [x, y] : pts) {
      char buf[128];
      std::snprintf(buf, sizeof buf,
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n",
                    f.px(x), f.py(y), color);
      out << buf;
    }
    return;
  }
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
  for (auto& [x, y] : pts) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", f.px(x), f.py(y));
    out << buf;
  }
  out << "\"/>\n";
}

Frame fit_frame(const std::vector<SvgSeries>& series) {
  Frame f{1e300, -1e300, 1e300, -1e300};
  for (const auto& s : series)
    for (auto& [x, y] : s.points) {
      f.xmin = std::min(f.xmin, x);
      f.xmax = std::max(f.xmax, x);
      f.ymin = std::min(f.ymin, y);
      f.ymax = std::max(f.ymax, y);
    }
  if (!(f.xmin < f.xmax)) f.xmax = f.xmin + 1;
  if (!(f.ymin < f.ymax)) f.ymax = f.ymin + 1;
  return f;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // prefer the shortest representation that round-trips
  for (int prec = 1; prec < 17; ++prec) {
    char cand[40];
    std::snprintf(cand, sizeof cand, "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(cand, "%lf", &back);
    if (back == v) return cand;
  }
  return buf;
}

void write_gridfunction_csv(const GridFunction& u, const std::string& path) {
  std::ofstream out = open_out(path);
  out << "x,value\n";
  const Grid& g = u.grid();
  for (int i = 0; i < g.n; ++i)
    out << format_double(g.x(i)) << ',' << format_double(u[i]) << '\n';

  json side;
  side["grid"] = {{"min", g.min}, {"max", g.max}, {"nodes", g.n}};
  side["left"] = side_json(u.left());
  side["right"] = side_json(u.right());
  std::ofstream sj = open_out(path + ".json");
  sj << side.dump(2) << '\n';
}

void write_table_csv(const std::string& path,
                     const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c)
    out << header[c] << (c + 1 < header.size() ? ',' : '\n');
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("io: ragged table row");
    for (std::size_t c = 0; c < row.size(); ++c)
      out << format_double(row[c]) << (c + 1 < row.size() ? ',' : '\n');
  }
}

void write_svg_profile(const std::string& path, const std::string& title,
                       const std::vector<SvgSeries>& series) {
  static const char* colors[] = {"steelblue", "crimson", "seagreen", "orange"};
  Frame f = fit_frame(series);
  std::ofstream out = open_out(path);
  svg_open(out, title, f);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = colors[i % 4];
    svg_polyline(out, f, series[i].points, color, false);
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.0f\" y=\"%.0f\" fill=\"%s\" "
                  "font-family=\"sans-serif\" font-size=\"11\">%s</text>\n",
                  Frame::W - Frame::pad - 150.0, Frame::pad + 16.0 + 14.0 * i,
                  color, series[i].label.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

void write_svg_loglog_fit(const std::string& path, const std::string& title,
                          const std::vector<std::pair<double, double>>& samples,
                          const ExponentFit& fit) {
  std::vector<std::pair<double, double>> logs;
  for (auto& [r, v] : samples)
    if (r > 0 && v > 0) logs.emplace_back(std::log10(r), std::log10(v));
  if (logs.empty()) throw std::invalid_argument("io: no positive samples");
  Frame f = fit_frame({{"", logs}});
  std::ofstream out = open_out(path);
  char head[160];
  std::snprintf(head, sizeof head, "%s (exponent %.4f, R2 %.5f)",
                title.c_str(), fit.exponent, fit.r2);
  svg_open(out, head, f);
  std::vector<std::pair<double, double>> line{
      {f.xmin, std::log10(fit.coefficient) + fit.exponent * f.xmin},
      {f.xmax, std::log10(fit.coefficient) + fit.exponent * f.xmax}};
  svg_polyline(out, f, line, "crimson", false);
  svg_polyline(out, f, logs, "steelblue", true);
  out << "</svg>\n";
}

}  // namespace nlfb
