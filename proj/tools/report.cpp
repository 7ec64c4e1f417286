#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "regait/version.hpp"

namespace regait::tools {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << text;
  if (!os) throw IoError("write failed: " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

Manifest::Manifest(std::string subcommand, std::string out_dir)
    : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)), start_(std::chrono::steady_clock::now()) {}

void Manifest::write() const {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json j;
  j["subcommand"] = subcommand_;
  j["params_file"] = params_file_;
  j["seed"] = seed_;
  j["output_dir"] = out_dir_;
  j["tool_version"] = kVersion;
  j["wall_clock_seconds"] = wall;
  j["options"] = options_;
  j["outputs"] = outputs_;
  write_json((fs::path(out_dir_) / "manifest.json").string(), j);
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const std::string& title, const std::vector<Panel>& panels) {
  const double width = 720, panel_h = 220, top = 40, left = 70, right = 160, gap = 50;
  const double plot_w = width - left - right;
  const double height = top + static_cast<double>(panels.size()) * (panel_h + gap);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
     << "</text>\n";
  for (size_t pi = 0; pi < panels.size(); ++pi) {
    const Panel& p = panels[pi];
    const double y0 = top + static_cast<double>(pi) * (panel_h + gap);
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const Series& s : p.series) {
      for (Eigen::Index i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x(i)) || !std::isfinite(s.y(i))) continue;
        xmin = std::min(xmin, s.x(i));
        xmax = std::max(xmax, s.x(i));
        ymin = std::min(ymin, s.y(i));
        ymax = std::max(ymax, s.y(i));
      }
    }
    if (!(xmax > xmin)) xmin -= 1, xmax += 1;
    if (!(ymax > ymin)) ymin -= 1, ymax += 1;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;
    auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto py = [&](double y) { return y0 + panel_h - (y - ymin) / (ymax - ymin) * panel_h; };

    os << "<rect x=\"" << num(left) << "\" y=\"" << num(y0) << "\" width=\"" << num(plot_w) << "\" height=\""
       << num(panel_h) << "\" fill=\"none\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << num(left) << "\" y=\"" << num(y0 - 6) << "\">" << escape(p.title) << "</text>\n";
    os << "<text x=\"" << num(left + plot_w / 2) << "\" y=\"" << num(y0 + panel_h + 30)
       << "\" text-anchor=\"middle\">" << escape(p.x_label) << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
      double yv = ymin + (ymax - ymin) * k / 4.0, xv = xmin + (xmax - xmin) * k / 4.0;
      os << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << tick(yv)
         << "</text>\n";
      os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(y0 + panel_h + 14) << "\" text-anchor=\"middle\">"
         << tick(xv) << "</text>\n";
    }
    for (size_t si = 0; si < p.series.size(); ++si) {
      const Series& s = p.series[si];
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\" points=\"";
      // Thin long series to at most ~2000 points.
      const Eigen::Index stride = std::max<Eigen::Index>(1, s.x.size() / 2000);
      for (Eigen::Index i = 0; i < s.x.size(); i += stride) {
        if (!std::isfinite(s.x(i)) || !std::isfinite(s.y(i))) continue;
        os << num(px(s.x(i))) << ',' << num(py(s.y(i))) << ' ';
      }
      os << "\"/>\n";
      const double ly = y0 + 14 + 16 * static_cast<double>(si);
      os << "<line x1=\"" << num(left + plot_w + 12) << "\" y1=\"" << num(ly - 4) << "\" x2=\"" << num(left + plot_w + 32)
         << "\" y2=\"" << num(ly - 4) << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
      os << "<text x=\"" << num(left + plot_w + 38) << "\" y=\"" << num(ly) << "\">" << escape(s.label) << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

int thread_budget() {
  int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("REGAIT_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) return std::min(cap, hw);
  }
  return hw;
}

}  // namespace regait::tools
