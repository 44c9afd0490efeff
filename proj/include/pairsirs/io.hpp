#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pairsirs/integrate.hpp"

namespace pairsirs {

inline constexpr const char* kArtifactVersion = "pairsirs 0.1.0";

/// Resolved run configuration embedded in every output file.
using Metadata = std::vector<std::pair<std::string, std::string>>;

std::string metadata_comment_block(const Metadata& meta);

/// Trajectory CSV: '#' metadata lines, then a header row "t,<components>".
template <class State>
void write_trajectory_csv(std::ostream& os, const Trajectory<State>& traj,
                          const Metadata& meta) {
    os << metadata_comment_block(meta);
    os << "t";
    for (const char* name : State::names()) os << "," << name;
    os << "\n";
    os.precision(17);
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << traj.times[k];
        for (std::size_t i = 0; i < State::size(); ++i) os << "," << traj.states[k][i];
        os << "\n";
    }
}

template <class State>
void write_trajectory_csv(const std::string& path, const Trajectory<State>& traj,
                          const Metadata& meta) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_trajectory_csv(os, traj, meta);
}

/// Minimal SVG 1.1 line/scatter plot. CSV stays the authoritative output;
/// this is a quick-look rendering with a framed data box and edge labels.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string xlabel, std::string ylabel,
            int width = 640, int height = 480);

    void add_line(const std::vector<double>& x, const std::vector<double>& y,
                  const std::string& color, double stroke_width = 1.5);
    void add_points(const std::vector<double>& x, const std::vector<double>& y,
                    const std::string& color, double radius = 2.5);
    void set_comment(const std::string& comment) { comment_ = comment; }

    void write(const std::string& path) const;
    std::string render() const;

private:
    struct Series {
        std::vector<double> x, y;
        std::string color;
        double size;
        bool points;
    };
    std::string title_, xlabel_, ylabel_, comment_;
    int width_, height_;
    std::vector<Series> series_;
};

} // namespace pairsirs
