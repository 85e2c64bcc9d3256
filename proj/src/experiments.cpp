#include "metasyn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "metasyn/csv.hpp"
#include "metasyn/error.hpp"

namespace metasyn {

namespace {

struct Job {
    NetworkConfig cfg;
    bool hardware = false;
    std::string label;
};

// Results land in a slot per job, so the outcome does not depend on the
// number of workers or the order they finish in.
std::vector<AccuracyTrace> run_jobs(const std::vector<Job>& jobs, std::size_t n_patterns,
                                    const HardwareSettings& hw, unsigned workers) {
    std::vector<AccuracyTrace> out(jobs.size());
    auto run_one = [&](std::size_t k) { out[k] = run_single(jobs[k].cfg, jobs[k].hardware, n_patterns, hw); };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
    if (n_threads == 1) {
        for (std::size_t k = 0; k < jobs.size(); ++k) run_one(k);
        return out;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t k = next++; k < jobs.size(); k = next++) {
                try {
                    run_one(k);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::string model_label(SynapseModel m, bool hardware) {
    return to_string(m) + (hardware ? "_hw" : "");
}

std::vector<RunRecord> collect(const std::vector<Job>& jobs, std::vector<AccuracyTrace> traces,
                               double threshold) {
    std::vector<RunRecord> runs(jobs.size());
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        runs[k].label = jobs[k].label;
        runs[k].model = jobs[k].cfg.model;
        runs[k].hardware = jobs[k].hardware;
        runs[k].seed = jobs[k].cfg.seed;
        runs[k].crossing = threshold_crossing(traces[k], threshold);
        runs[k].trace = std::move(traces[k]);
    }
    return runs;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Sample standard deviation; zero for a single value.
double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

LabelSummary summarize(const std::string& label, const std::vector<const RunRecord*>& runs,
                       std::size_t n_patterns) {
    LabelSummary s;
    s.label = label;
    s.n_seeds = runs.size();
    std::vector<double> crossings;
    std::vector<double> learning_end;
    std::vector<double> mean_end;
    for (const RunRecord* r : runs) {
        if (r->crossing) {
            crossings.push_back(static_cast<double>(*r->crossing));
        } else {
            crossings.push_back(static_cast<double>(n_patterns + 1));
            ++s.censored;
        }
        learning_end.push_back(r->trace.learning.back());
        mean_end.push_back(r->trace.mean.back());
    }
    s.crossing_mean = mean_of(crossings);
    s.crossing_std = std_of(crossings);
    s.learning_final = mean_of(learning_end);
    s.mean_final = mean_of(mean_end);

    s.mean_curve.resize(n_patterns);
    s.mean_curve_std.resize(n_patterns);
    s.learning_curve.resize(n_patterns);
    std::vector<double> column(runs.size());
    for (std::size_t t = 0; t < n_patterns; ++t) {
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r]->trace.mean[t];
        s.mean_curve[t] = mean_of(column);
        s.mean_curve_std[t] = std_of(column);
        for (std::size_t r = 0; r < runs.size(); ++r) column[r] = runs[r]->trace.learning[t];
        s.learning_curve[t] = mean_of(column);
    }
    return s;
}

// Summaries in order of first appearance of each label.
std::vector<LabelSummary> summarize_all(const std::vector<RunRecord>& runs, std::size_t n_patterns) {
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunRecord*>> by_label;
    for (const auto& r : runs) {
        auto [it, fresh] = by_label.try_emplace(r.label);
        if (fresh) order.push_back(r.label);
        it->second.push_back(&r);
    }
    std::vector<LabelSummary> out;
    for (const auto& label : order) {
        out.push_back(summarize(label, by_label[label], n_patterns));
    }
    return out;
}

void check_common(const ExperimentSpec& spec) {
    if (spec.seeds.empty()) throw ConfigError("at least one seed is required");
    if (spec.n_patterns < 1) throw ConfigError("n_patterns must be >= 1");
    if (!(spec.mean_threshold > 0.0 && spec.mean_threshold <= 1.0)) {
        throw ConfigError("mean_threshold must lie in (0, 1]");
    }
}

bool hardware_capable(SynapseModel m) { return m != SynapseModel::GradientDescent; }

} // namespace

std::string to_string(ExperimentVariant v) {
    switch (v) {
    case ExperimentVariant::CompareModels:
        return "compare";
    case ExperimentVariant::SweepSize:
        return "sweep-size";
    case ExperimentVariant::SweepCF:
        return "sweep-cf";
    }
    return "unknown";
}

void ExperimentSpec::validate() const {
    check_common(*this);
    switch (variant) {
    case ExperimentVariant::CompareModels:
        base.validate();
        if (models.empty()) throw ConfigError("compare needs at least one model");
        if (!software && !hardware) throw ConfigError("neither the software nor the hardware path is enabled");
        if (!software && std::none_of(models.begin(), models.end(), hardware_capable)) {
            throw ConfigError("the hardware path supports binary and multistate models only");
        }
        break;
    case ExperimentVariant::SweepSize:
        if (size_grid.empty()) throw ConfigError("size_grid is empty");
        if (hardware && !hardware_capable(base.model)) {
            throw ConfigError("the hardware path supports binary and multistate models only");
        }
        break;
    case ExperimentVariant::SweepCF:
        if (c_grid.empty() || f_grid.empty()) throw ConfigError("c_grid and f_grid must be non-empty");
        if (hardware && !hardware_capable(base.model)) {
            throw ConfigError("the hardware path supports binary and multistate models only");
        }
        break;
    }
}

std::optional<std::size_t> threshold_crossing(const AccuracyTrace& trace, double threshold) {
    if (trace.mean.empty()) {
        throw ContractViolation("threshold_crossing: empty trace");
    }
    for (std::size_t t = 0; t < trace.mean.size(); ++t) {
        if (trace.mean[t] < threshold) return t + 1;
    }
    return std::nullopt;
}

const LabelSummary* SweepResult::summary(const std::string& label) const {
    for (const auto& s : summaries) {
        if (s.label == label) return &s;
    }
    return nullptr;
}

AccuracyTrace run_single(const NetworkConfig& cfg, bool hardware, std::size_t n_patterns,
                         const HardwareSettings& hw) {
    if (!hardware) {
        return run_lifetime(cfg, n_patterns);
    }
    return run_lifetime_hw(cfg, n_patterns, hw.comparator, hw.noise, hw.options);
}

SweepResult run_comparison(const ExperimentSpec& spec) {
    ExperimentSpec s = spec;
    s.variant = ExperimentVariant::CompareModels;
    s.validate();

    std::vector<Job> jobs;
    for (const bool hw : {false, true}) {
        if (hw ? !s.hardware : !s.software) continue;
        for (SynapseModel m : s.models) {
            if (hw && !hardware_capable(m)) continue;
            for (std::uint64_t seed : s.seeds) {
                NetworkConfig cfg = s.base;
                cfg.model = m;
                cfg.seed = seed;
                jobs.push_back({cfg, hw, model_label(m, hw)});
            }
        }
    }

    SweepResult result;
    result.variant = ExperimentVariant::CompareModels;
    result.n_patterns = s.n_patterns;
    result.axes = {"model"};
    result.runs = collect(jobs, run_jobs(jobs, s.n_patterns, s.hw, s.workers), s.mean_threshold);
    result.summaries = summarize_all(result.runs, s.n_patterns);

    for (auto& sum : result.summaries) {
        const bool hw = sum.label.size() > 3 && sum.label.compare(sum.label.size() - 3, 3, "_hw") == 0;
        const LabelSummary* binary = result.summary(model_label(SynapseModel::Binary, hw));
        if (binary && binary->crossing_mean > 0.0) {
            sum.ratio_vs_binary = sum.crossing_mean / binary->crossing_mean;
        }
    }
    return result;
}

SweepResult sweep_size(const ExperimentSpec& spec) {
    ExperimentSpec s = spec;
    s.variant = ExperimentVariant::SweepSize;
    s.validate();

    SweepResult result;
    result.variant = ExperimentVariant::SweepSize;
    result.n_patterns = s.n_patterns;
    result.axes = {"size"};

    std::vector<Job> jobs;
    for (std::size_t n : s.size_grid) {
        GridCell cell;
        cell.size = n;
        cell.connectivity = s.base.connectivity;
        cell.activity = s.base.activity;
        NetworkConfig cfg = s.base;
        cfg.n_in = cfg.n_out = n;
        try {
            cfg.validate();
            cell.valid = true;
        } catch (const ConfigError&) {
            cell.valid = false;
        }
        result.cells.push_back(cell);
        if (!cell.valid) continue;
        for (std::uint64_t seed : s.seeds) {
            cfg.seed = seed;
            jobs.push_back({cfg, s.hardware, model_label(cfg.model, s.hardware) + "_n" + std::to_string(n)});
        }
    }
    result.runs = collect(jobs, run_jobs(jobs, s.n_patterns, s.hw, s.workers), s.mean_threshold);
    result.summaries = summarize_all(result.runs, s.n_patterns);

    for (auto& cell : result.cells) {
        if (!cell.valid) continue;
        const LabelSummary* sum =
            result.summary(model_label(s.base.model, s.hardware) + "_n" + std::to_string(cell.size));
        cell.learning_final = sum->learning_final;
        cell.mean_final = sum->mean_final;
    }
    return result;
}

SweepResult sweep_cf(const ExperimentSpec& spec) {
    ExperimentSpec s = spec;
    s.variant = ExperimentVariant::SweepCF;
    s.validate();

    SweepResult result;
    result.variant = ExperimentVariant::SweepCF;
    result.n_patterns = s.n_patterns;
    result.axes = {"connectivity", "activity"};

    auto cell_label = [&](double c, double f) {
        return model_label(s.base.model, s.hardware) + "_c" + format_number(c) + "_f" + format_number(f);
    };

    std::vector<Job> jobs;
    for (double c : s.c_grid) {
        for (double f : s.f_grid) {
            GridCell cell;
            cell.size = s.base.n_in;
            cell.connectivity = c;
            cell.activity = f;
            NetworkConfig cfg = s.base;
            cfg.connectivity = c;
            cfg.activity = f;
            try {
                cfg.validate();
                cell.valid = true;
            } catch (const ConfigError&) {
                cell.valid = false;
            }
            result.cells.push_back(cell);
            if (!cell.valid) continue;
            for (std::uint64_t seed : s.seeds) {
                cfg.seed = seed;
                jobs.push_back({cfg, s.hardware, cell_label(c, f)});
            }
        }
    }
    result.runs = collect(jobs, run_jobs(jobs, s.n_patterns, s.hw, s.workers), s.mean_threshold);
    result.summaries = summarize_all(result.runs, s.n_patterns);

    for (auto& cell : result.cells) {
        if (!cell.valid) continue;
        const LabelSummary* sum = result.summary(cell_label(cell.connectivity, cell.activity));
        cell.learning_final = sum->learning_final;
        cell.mean_final = sum->mean_final;
    }
    return result;
}

SweepResult run_experiment(const ExperimentSpec& spec) {
    switch (spec.variant) {
    case ExperimentVariant::CompareModels:
        return run_comparison(spec);
    case ExperimentVariant::SweepSize:
        return sweep_size(spec);
    case ExperimentVariant::SweepCF:
        return sweep_cf(spec);
    }
    throw ContractViolation("run_experiment: unknown variant");
}

} // namespace metasyn
