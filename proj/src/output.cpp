#include "metasyn/output.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "metasyn/csv.hpp"
#include "metasyn/error.hpp"

namespace metasyn {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

// Accuracy on a white-to-blue ramp.
std::string ramp(double v) {
    const double t = std::clamp(v, 0.0, 1.0);
    const int r = static_cast<int>(255.0 - t * (255.0 - 31.0));
    const int g = static_cast<int>(255.0 - t * (255.0 - 119.0));
    const int b = static_cast<int>(255.0 - t * (255.0 - 180.0));
    std::ostringstream os;
    os << "rgb(" << r << ',' << g << ',' << b << ')';
    return os.str();
}

std::string to_csv(void (*writer)(std::ostream&, const SweepResult&), const SweepResult& result) {
    std::ostringstream os;
    writer(os, result);
    return os.str();
}

} // namespace

void write_traces_csv(std::ostream& os, const SweepResult& result) {
    os << "model,seed,pattern_index,learning_acc,mean_acc\n";
    for (const auto& run : result.runs) {
        for (std::size_t t = 0; t < run.trace.size(); ++t) {
            os << run.label << ',' << run.seed << ',' << (t + 1) << ',' << format_number(run.trace.learning[t])
               << ',' << format_number(run.trace.mean[t]) << '\n';
        }
    }
}

void write_summary_csv(std::ostream& os, const SweepResult& result) {
    os << "model,crossing_mean,crossing_std,ratio_vs_binary\n";
    for (const auto& s : result.summaries) {
        os << s.label << ',' << format_number(s.crossing_mean) << ',' << format_number(s.crossing_std) << ',';
        if (s.ratio_vs_binary) os << format_number(*s.ratio_vs_binary);
        os << '\n';
    }
}

void write_cf_grid_csv(std::ostream& os, const SweepResult& result) {
    os << "connectivity,activity,mean_acc_at_100,valid_flag\n";
    for (const auto& c : result.cells) {
        os << format_number(c.connectivity) << ',' << format_number(c.activity) << ',';
        if (c.valid) os << format_number(c.mean_final);
        os << ',' << (c.valid ? 1 : 0) << '\n';
    }
}

void write_size_grid_csv(std::ostream& os, const SweepResult& result) {
    os << "size,learning_acc_final,mean_acc_final,valid_flag\n";
    for (const auto& c : result.cells) {
        os << c.size << ',';
        if (c.valid) os << format_number(c.learning_final);
        os << ',';
        if (c.valid) os << format_number(c.mean_final);
        os << ',' << (c.valid ? 1 : 0) << '\n';
    }
}

std::string line_plot_svg(const SweepResult& result, bool mean_curves, const std::string& title) {
    const double w = 640, h = 400, left = 60, right = 160, top = 40, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;
    const std::size_t n = std::max<std::size_t>(result.n_patterns, 2);
    auto px = [&](std::size_t t) { return left + pw * static_cast<double>(t) / static_cast<double>(n - 1); };
    auto py = [&](double acc) { return top + ph * (1.0 - acc); };

    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double acc = k / 4.0;
        os << "<text x=\"" << left - 8 << "\" y=\"" << fixed(py(acc) + 4, 1)
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << fixed(acc, 2) << "</text>\n";
    }
    os << "<text x=\"" << left + pw / 2 << "\" y=\"" << h - 12
       << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">patterns presented</text>\n";
    os << "<text x=\"" << left << "\" y=\"" << top + ph + 16 << "\" font-family=\"sans-serif\" font-size=\"11\">1</text>\n";
    os << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 16
       << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">" << result.n_patterns << "</text>\n";

    for (std::size_t i = 0; i < result.summaries.size(); ++i) {
        const auto& s = result.summaries[i];
        const auto& curve = mean_curves ? s.mean_curve : s.learning_curve;
        const char* colour = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t t = 0; t < curve.size(); ++t) {
            os << (t ? " " : "") << fixed(px(t), 2) << ',' << fixed(py(curve[t]), 2);
        }
        os << "\"/>\n";
        const double ly = top + 14.0 + 16.0 * static_cast<double>(i);
        os << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 30 << "\" y2=\""
           << ly - 4 << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"11\">"
           << s.label << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heatmap_svg(const SweepResult& result, const std::string& title) {
    std::vector<double> cs;
    std::vector<double> fs;
    for (const auto& c : result.cells) {
        if (std::find(cs.begin(), cs.end(), c.connectivity) == cs.end()) cs.push_back(c.connectivity);
        if (std::find(fs.begin(), fs.end(), c.activity) == fs.end()) fs.push_back(c.activity);
    }
    const double cell = 56, left = 70, top = 50;
    const double w = left + cell * static_cast<double>(fs.size()) + 20;
    const double h = top + cell * static_cast<double>(cs.size()) + 50;

    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << left << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
    for (const auto& c : result.cells) {
        const auto row = static_cast<double>(std::find(cs.begin(), cs.end(), c.connectivity) - cs.begin());
        const auto col = static_cast<double>(std::find(fs.begin(), fs.end(), c.activity) - fs.begin());
        const double x = left + col * cell;
        const double y = top + row * cell;
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
           << (c.valid ? ramp(c.mean_final) : std::string("#dddddd")) << "\" stroke=\"white\"/>\n";
        os << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">"
           << (c.valid ? fixed(c.mean_final, 2) : std::string("n/a")) << "</text>\n";
    }
    for (std::size_t r = 0; r < cs.size(); ++r) {
        os << "<text x=\"" << left - 6 << "\" y=\"" << top + cell * static_cast<double>(r) + cell / 2 + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">C=" << format_number(cs[r])
           << "</text>\n";
    }
    for (std::size_t k = 0; k < fs.size(); ++k) {
        os << "<text x=\"" << left + cell * static_cast<double>(k) + cell / 2 << "\" y=\""
           << top + cell * static_cast<double>(cs.size()) + 16
           << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">f=" << format_number(fs[k])
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::vector<std::filesystem::path> write_outputs(const SweepResult& result, const std::filesystem::path& dir,
                                                 bool plots) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    std::vector<std::filesystem::path> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        const auto path = dir / name;
        write_text_file(path, text);
        written.push_back(path);
    };

    switch (result.variant) {
    case ExperimentVariant::CompareModels:
        emit("traces.csv", to_csv(write_traces_csv, result));
        emit("summary.csv", to_csv(write_summary_csv, result));
        if (plots) {
            emit("mean_accuracy.svg", line_plot_svg(result, true, "Mean accuracy"));
            emit("learning_accuracy.svg", line_plot_svg(result, false, "Learning accuracy"));
        }
        break;
    case ExperimentVariant::SweepSize:
        emit("traces.csv", to_csv(write_traces_csv, result));
        emit("summary.csv", to_csv(write_summary_csv, result));
        emit("size_grid.csv", to_csv(write_size_grid_csv, result));
        if (plots) {
            emit("mean_accuracy.svg", line_plot_svg(result, true, "Mean accuracy by network size"));
        }
        break;
    case ExperimentVariant::SweepCF:
        emit("cf_grid.csv", to_csv(write_cf_grid_csv, result));
        if (plots) {
            emit("cf_grid.svg", heatmap_svg(result, "Mean accuracy after the last pattern"));
        }
        break;
    }
    return written;
}

} // namespace metasyn
