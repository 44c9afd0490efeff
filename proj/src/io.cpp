#include "pairsirs/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pairsirs {

std::string metadata_comment_block(const Metadata& meta) {
    std::ostringstream os;
    os << "# version=" << kArtifactVersion << "\n";
    for (const auto& [k, v] : meta) os << "# " << k << "=" << v << "\n";
    return os.str();
}

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel,
                 int width, int height)
    : title_(std::move(title)), xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)), width_(width), height_(height) {}

void SvgPlot::add_line(const std::vector<double>& x, const std::vector<double>& y,
                       const std::string& color, double stroke_width) {
    series_.push_back({x, y, color, stroke_width, false});
}

void SvgPlot::add_points(const std::vector<double>& x, const std::vector<double>& y,
                         const std::string& color, double radius) {
    series_.push_back({x, y, color, radius, true});
}

std::string SvgPlot::render() const {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series_) {
        for (double v : s.x) {
            if (std::isfinite(v)) { xmin = std::min(xmin, v); xmax = std::max(xmax, v); }
        }
        for (double v : s.y) {
            if (std::isfinite(v)) { ymin = std::min(ymin, v); ymax = std::max(ymax, v); }
        }
    }
    if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
    if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
    const double padx = 0.04 * (xmax - xmin), pady = 0.04 * (ymax - ymin);
    xmin -= padx; xmax += padx; ymin -= pady; ymax += pady;

    const double ml = 60, mr = 15, mt = 35, mb = 45;
    const double pw = width_ - ml - mr, ph = height_ - mt - mb;
    auto X = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream os;
    os.precision(8);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\""
       << width_ << "\" height=\"" << height_ << "\">\n";
    if (!comment_.empty()) os << "<!-- " << comment_ << " -->\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
       << "\" height=\"" << ph << "\" fill=\"white\" stroke=\"black\"/>\n";
    os << "<text x=\"" << width_ / 2 << "\" y=\"20\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">" << title_ << "</text>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height_ - 10
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
       << xlabel_ << "</text>\n";
    os << "<text x=\"15\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
          "transform=\"rotate(-90 15 " << mt + ph / 2 << ")\">" << ylabel_ << "</text>\n";
    // corner tick labels
    os.precision(6);
    os << "<text x=\"" << ml << "\" y=\"" << height_ - mb + 16
       << "\" font-family=\"sans-serif\" font-size=\"10\">" << xmin + padx << "</text>\n";
    os << "<text x=\"" << ml + pw << "\" y=\"" << height_ - mb + 16
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << xmax - padx << "</text>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << mt + ph
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << ymin + pady << "</text>\n";
    os << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 10
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
       << ymax - pady << "</text>\n";

    os.precision(8);
    for (const auto& s : series_) {
        if (s.points) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i])
                   << "\" r=\"" << s.size << "\" fill=\"" << s.color << "\"/>\n";
            }
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << s.color
               << "\" stroke-width=\"" << s.size << "\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                os << X(s.x[i]) << "," << Y(s.y[i]) << " ";
            }
            os << "\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

void SvgPlot::write(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << render();
}

} // namespace pairsirs
