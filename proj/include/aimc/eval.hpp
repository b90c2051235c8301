#pragma once

// Accuracy-vs-SNR benchmarking with a nearest-centroid spectrogram baseline.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "aimc/container.hpp"
#include "aimc/dataset.hpp"
#include "aimc/errors.hpp"
#include "aimc/image.hpp"
#include "aimc/parallel.hpp"
#include "aimc/taxonomy.hpp"
#include "aimc/tfr.hpp"

namespace aimc::eval {

using Feature = std::vector<float>;

struct FeatureOptions {
    double sample_rate = 1.0e8;
    int win_len = 256;
    int hop = 128;
    int size = 32;           // output is size x size
    double floor_db = -40.0; // dB clip below the crop peak
    bool fit_band = true;    // crop rows to the occupied band instead of a fixed window
    double band_fraction = 0.2;  // occupied band: bins above this fraction of the peak excess power
    double gate_bias = 0.5;      // per-frame bias (noise sigmas) in the pulse segment search
    double gate_z = 6.0;         // significance needed to accept the segment
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
    if (v.empty()) return 0;
    const auto k = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace detail

/// Blind-aligned gray dB spectrogram feature, flattened and L2-normalized.
///
/// The pulse is located blindly: frames come from the most significant
/// contiguous excess-energy segment (the whole capture when none is
/// significant), and rows are cropped
/// to the occupied band (with a margin). The crop is converted to dB, clipped,
/// area-resized to size x size and min-max scaled, so the result depends on
/// neither capture amplitude, pulse width, carrier nor bandwidth scale.
inline Feature featurize(std::span<const cfloat> iq, const FeatureOptions& opt = {}) {
    const Spectrogram s = tfr::stft(iq, opt.win_len, opt.hop, opt.sample_rate);
    const int bins = s.freq_bins, frames = s.frames;
    std::vector<double> power(s.values.size());
    for (std::size_t i = 0; i < power.size(); ++i) power[i] = std::norm(s.values[i]);

    std::vector<double> energy(static_cast<std::size_t>(frames), 0.0);
    for (int k = 0; k < bins; ++k)
        for (int f = 0; f < frames; ++f) energy[static_cast<std::size_t>(f)] += power[static_cast<std::size_t>(k) * frames + f];

    // Noise level and spread by sigma clipping, started from a low quantile
    // because the pulse may fill up to half of the frames.
    double level = detail::quantile(energy, 0.3);
    double sigma = std::max(level - detail::quantile(energy, 0.05), 1e-300);
    for (int it = 0; it < 8; ++it) {
        double sum = 0, sum2 = 0;
        std::size_t n = 0;
        for (double e : energy)
            if (std::abs(e - level) < 3 * sigma) {
                sum += e;
                sum2 += e * e;
                ++n;
            }
        if (n < 2) break;
        level = sum / static_cast<double>(n);
        sigma = std::max(std::sqrt(std::max(0.0, sum2 / static_cast<double>(n) - level * level)), 1e-300);
    }

    // Pulse frames: the contiguous segment maximizing the biased excess
    // energy, kept only when its excess is significant.
    int first = 0, last = frames - 1;
    {
        double run = 0, best = 0;
        int start = 0, best_first = -1, best_last = -1;
        for (int f = 0; f < frames; ++f) {
            const double x = energy[static_cast<std::size_t>(f)] - level - opt.gate_bias * sigma;
            if (run <= 0) {
                run = 0;
                start = f;
            }
            run += x;
            if (run > best) {
                best = run;
                best_first = start;
                best_last = f;
            }
        }
        if (best_first >= 0) {
            double excess = 0;
            for (int f = best_first; f <= best_last; ++f) excess += energy[static_cast<std::size_t>(f)] - level;
            const double z = excess / (sigma * std::sqrt(double(best_last - best_first + 1)));
            if (z >= opt.gate_z) {
                first = best_first;
                last = best_last;
            }
        }
    }

    // Frequency centroid of the excess power inside the pulse frames.
    std::vector<double> profile(static_cast<std::size_t>(bins), 0.0);
    for (int k = 0; k < bins; ++k)
        for (int f = first; f <= last; ++f) profile[static_cast<std::size_t>(k)] += power[static_cast<std::size_t>(k) * frames + f];
    const double floor = detail::quantile(profile, 0.5);
    double wsum = 0, csum = 0;
    for (int k = 0; k < bins; ++k) {
        const double w = std::max(0.0, profile[static_cast<std::size_t>(k)] - floor);
        wsum += w;
        csum += w * k;
    }
    const int centre = wsum > 0 ? static_cast<int>(std::lround(csum / wsum)) : bins / 2;
    int rows = std::min(bins, opt.size);
    int top = std::clamp(centre - rows / 2, 0, bins - rows);
    if (opt.fit_band && wsum > 0) {
        double peak_excess = 0;
        for (int k = 0; k < bins; ++k) peak_excess = std::max(peak_excess, profile[static_cast<std::size_t>(k)] - floor);
        int lo = bins, hi = -1;
        for (int k = 0; k < bins; ++k)
            if (profile[static_cast<std::size_t>(k)] - floor > opt.band_fraction * peak_excess) {
                lo = std::min(lo, k);
                hi = std::max(hi, k);
            }
        const int margin = std::max(2, (hi - lo + 1) / 4);
        top = std::max(0, lo - margin);
        rows = std::min(bins - 1, hi + margin) - top + 1;
    }

    const int cols = last - first + 1;
    Image crop(rows, cols, 1);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            crop.at(r, c) = static_cast<float>(10.0 * std::log10(power[static_cast<std::size_t>(top + r) * frames + first + c] + 1e-30));
    const float peak = *std::max_element(crop.data.begin(), crop.data.end());
    for (auto& v : crop.data) v = std::max(v, peak + static_cast<float>(opt.floor_db));
    Image small = resize(crop, opt.size, opt.size, Interpolation::area);
    tfr::normalize_minmax(small.data);

    Feature out(small.data.begin(), small.data.end());
    double norm = 0;
    for (float v : out) norm += double(v) * v;
    norm = std::sqrt(norm);
    if (norm > 0)
        for (auto& v : out) v = static_cast<float>(v / norm);
    return out;
}

inline double dot(const Feature& a, const Feature& b) {
    double acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += double(a[i]) * b[i];
    return acc;
}

/// Per-class mean vectors; classification by maximum cosine similarity,
/// ties resolved in favour of the lowest class index.
class NearestCentroid {
public:
    static NearestCentroid fit(const std::vector<Feature>& features, const std::vector<int>& labels, int n_classes) {
        if (features.size() != labels.size()) throw Error("feature/label count mismatch");
        NearestCentroid m;
        std::vector<std::size_t> counts(static_cast<std::size_t>(n_classes), 0);
        const std::size_t dim = features.empty() ? 0 : features.front().size();
        std::vector<std::vector<double>> sums(static_cast<std::size_t>(n_classes), std::vector<double>(dim, 0.0));
        for (std::size_t i = 0; i < features.size(); ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            if (labels[i] < 0 || c >= counts.size()) throw Error("label out of range");
            ++counts[c];
            for (std::size_t d = 0; d < dim; ++d) sums[c][d] += features[i][d];
        }
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c] == 0) throw Error("class " + std::to_string(c) + " has no training examples");
            Feature centroid(dim);
            double norm = 0;
            for (std::size_t d = 0; d < dim; ++d) {
                centroid[d] = static_cast<float>(sums[c][d] / static_cast<double>(counts[c]));
                norm += double(centroid[d]) * centroid[d];
            }
            norm = std::sqrt(norm);
            if (norm > 0)
                for (auto& v : centroid) v = static_cast<float>(v / norm);
            m.centroids_.push_back(std::move(centroid));
        }
        return m;
    }

    int classify(const Feature& x) const {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids_.size(); ++c) {
            const double score = dot(x, centroids_[c]);
            if (score > best_score) {
                best_score = score;
                best = static_cast<int>(c);
            }
        }
        return best;
    }

    std::size_t class_count() const noexcept { return centroids_.size(); }
    const std::vector<Feature>& centroids() const noexcept { return centroids_; }

private:
    std::vector<Feature> centroids_;
};

// ---------------------------------------------------------------------------
// Experiments

enum class Regime { same_snr, all_to_x };
enum class Subset { all, fm_only };

inline Regime parse_regime(std::string_view s) {
    if (s == "same_snr") return Regime::same_snr;
    if (s == "all_to_x") return Regime::all_to_x;
    throw Error("unknown experiment kind '" + std::string(s) + "' (expected same_snr or all_to_x)");
}

inline Subset parse_subset(std::string_view s) {
    if (s == "all") return Subset::all;
    if (s == "fm_only") return Subset::fm_only;
    throw Error("unknown class subset '" + std::string(s) + "' (expected all or fm_only)");
}

inline const char* to_string(Regime r) noexcept { return r == Regime::same_snr ? "same_snr" : "all_to_x"; }
inline const char* to_string(Subset s) noexcept { return s == Subset::all ? "all" : "fm_only"; }

/// Features of every stored pulse, keyed by (snr, class id).
struct FeatureStore {
    std::vector<double> snr_levels;
    std::vector<std::string> class_ids;  // registry order
    std::map<std::pair<double, std::string>, std::vector<Feature>> features;

    const std::vector<Feature>& at(double snr, const std::string& cls) const {
        auto it = features.find({snr, cls});
        if (it == features.end())
            throw Error("missing stratum: " + cls + " at " + dataset::snr_dir_name(snr));
        return it->second;
    }
};

inline FeatureStore extract_features(const dataset::DatasetManifest& manifest, const std::filesystem::path& root,
                                     int jobs = 0, const FeatureOptions& base = {}) {
    FeatureStore store;
    store.snr_levels = manifest.snr_levels();
    store.class_ids = manifest.class_ids();
    FeatureOptions opt = base;
    opt.sample_rate = manifest.config.sample_rate;
    std::vector<std::vector<Feature>> per_file(manifest.entries.size());
    parallel_for(manifest.entries.size(), resolve_jobs(jobs), [&](std::size_t i) {
        const auto& e = manifest.entries[i];
        const auto file = root / e.path;
        if (!std::filesystem::exists(file)) throw Error("missing class file " + file.string());
        container::for_each_record(file, [&](std::uint32_t, const container::ClassRecord& r) {
            per_file[i].push_back(featurize(r.iq, opt));
        });
    });
    for (std::size_t i = 0; i < manifest.entries.size(); ++i)
        store.features[{manifest.entries[i].snr_db, manifest.entries[i].class_id}] = std::move(per_file[i]);
    return store;
}

struct SnrResult {
    double snr_db = 0;
    double accuracy_pct = 0;
    std::vector<std::vector<std::uint32_t>> confusion;  // [true][predicted]
    std::uint32_t correct = 0;
    std::uint32_t total = 0;
};

struct EvalReport {
    Regime regime = Regime::same_snr;
    Subset subset = Subset::all;
    std::uint64_t split_seed = 0;
    std::string preset = "lpi_net-like 32x32 gray dB";
    std::string classifier = "nearest_centroid";
    std::vector<std::string> classes;
    std::vector<SnrResult> results;

    std::vector<double> accuracies() const {
        std::vector<double> out;
        for (const auto& r : results) out.push_back(r.accuracy_pct);
        return out;
    }

    std::vector<double> snrs() const {
        std::vector<double> out;
        for (const auto& r : results) out.push_back(r.snr_db);
        return out;
    }

    Json to_json() const {
        Json j{{"kind", to_string(regime)}, {"subset", to_string(subset)}, {"split_seed", split_seed},
               {"preset", preset}, {"classifier", classifier}, {"classes", classes}};
        j["results"] = Json::array();
        for (const auto& r : results)
            j["results"].push_back({{"snr_db", r.snr_db}, {"accuracy_pct", r.accuracy_pct}, {"correct", r.correct},
                                    {"total", r.total}, {"confusion", r.confusion}});
        return j;
    }
};

inline std::vector<std::string> subset_classes(const std::vector<std::string>& available, Subset subset,
                                               const Registry& registry = default_registry()) {
    if (subset == Subset::all) return available;
    std::vector<std::string> out;
    for (const auto& id : available)
        if (registry.at(id).family == Family::FM) out.push_back(id);
    return out;
}

/// Runs one regime on one class subset with a stratified split.
inline EvalReport run_experiment(const FeatureStore& store, const dataset::DatasetManifest& manifest, Regime regime,
                                 Subset subset, std::uint64_t split_seed, double ratio = 0.8) {
    EvalReport report;
    report.regime = regime;
    report.subset = subset;
    report.split_seed = split_seed;
    report.classes = subset_classes(store.class_ids, subset);
    if (report.classes.empty()) throw Error("no classes available for subset " + std::string(to_string(subset)));
    const int n_classes = static_cast<int>(report.classes.size());
    std::map<std::string, int> label_of;
    for (int c = 0; c < n_classes; ++c) label_of[report.classes[static_cast<std::size_t>(c)]] = c;

    const auto strata = dataset::split_train_test(manifest, ratio, split_seed);
    struct Indexed {
        const dataset::Stratum* stratum;
        int label;
    };
    std::map<double, std::vector<Indexed>> by_snr;
    for (const auto& s : strata)
        if (auto it = label_of.find(s.class_id); it != label_of.end()) by_snr[s.snr_db].push_back({&s, it->second});
    for (double snr : store.snr_levels)
        for (const auto& cls : report.classes)
            if (std::none_of(by_snr[snr].begin(), by_snr[snr].end(),
                             [&](const Indexed& x) { return x.stratum->class_id == cls; }))
                throw Error("missing stratum: " + cls + " at " + dataset::snr_dir_name(snr));

    auto gather = [&](double snr, bool train, std::vector<Feature>& xs, std::vector<int>& ys) {
        for (const auto& item : by_snr[snr]) {
            const auto& feats = store.at(snr, item.stratum->class_id);
            for (auto idx : train ? item.stratum->train : item.stratum->test) {
                xs.push_back(feats.at(idx));
                ys.push_back(item.label);
            }
        }
    };

    std::optional<NearestCentroid> pooled;
    if (regime == Regime::all_to_x) {
        std::vector<Feature> xs;
        std::vector<int> ys;
        for (double snr : store.snr_levels) gather(snr, true, xs, ys);
        pooled = NearestCentroid::fit(xs, ys, n_classes);
    }
    for (double snr : store.snr_levels) {
        NearestCentroid model;
        if (pooled) {
            model = *pooled;
        } else {
            std::vector<Feature> xs;
            std::vector<int> ys;
            gather(snr, true, xs, ys);
            model = NearestCentroid::fit(xs, ys, n_classes);
        }
        std::vector<Feature> xs;
        std::vector<int> ys;
        gather(snr, false, xs, ys);
        SnrResult r;
        r.snr_db = snr;
        r.confusion.assign(static_cast<std::size_t>(n_classes), std::vector<std::uint32_t>(static_cast<std::size_t>(n_classes), 0));
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const int pred = model.classify(xs[i]);
            ++r.confusion[static_cast<std::size_t>(ys[i])][static_cast<std::size_t>(pred)];
            if (pred == ys[i]) ++r.correct;
            ++r.total;
        }
        r.accuracy_pct = r.total ? 100.0 * r.correct / r.total : 0.0;
        report.results.push_back(std::move(r));
    }
    return report;
}

inline EvalReport run_experiment(const dataset::DatasetManifest& manifest, const std::filesystem::path& root,
                                 Regime regime, Subset subset, std::uint64_t split_seed, int jobs = 0) {
    return run_experiment(extract_features(manifest, root, jobs), manifest, regime, subset, split_seed);
}

// ---------------------------------------------------------------------------
// Statistics and output

/// Ranks with ties given their average rank (1-based).
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

/// Spearman rank correlation; NaN when either series is constant.
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("spearman needs two equal series of length >= 2");
    const auto rx = average_ranks(x), ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0 || syy == 0) return std::numeric_limits<double>::quiet_NaN();
    return sxy / std::sqrt(sxx * syy);
}

/// Accuracy table: one row per SNR, one column per named report.
inline std::string accuracy_csv(const std::vector<std::pair<std::string, const EvalReport*>>& columns) {
    std::ostringstream os;
    os << "snr_db";
    for (const auto& [name, _] : columns) os << ',' << name;
    os << '\n' << std::fixed << std::setprecision(2);
    if (columns.empty()) return os.str();
    const auto& first = *columns.front().second;
    for (std::size_t i = 0; i < first.results.size(); ++i) {
        os << dataset::snr_dir_name(first.results[i].snr_db).substr(4);
        for (const auto& [_, rep] : columns) os << ',' << rep->results.at(i).accuracy_pct;
        os << '\n';
    }
    return os.str();
}

inline std::string confusion_csv(const EvalReport& report, std::size_t snr_index) {
    const auto& r = report.results.at(snr_index);
    std::ostringstream os;
    os << "true\\predicted";
    for (const auto& c : report.classes) os << ',' << c;
    os << '\n';
    for (std::size_t t = 0; t < report.classes.size(); ++t) {
        os << report.classes[t];
        for (auto v : r.confusion[t]) os << ',' << v;
        os << '\n';
    }
    return os.str();
}

/// Line chart of accuracy (%) against SNR (dB).
inline std::string accuracy_svg(const std::vector<std::pair<std::string, const EvalReport*>>& series) {
    const double W = 640, H = 400, left = 60, right = 150, top = 20, bottom = 50;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& [_, rep] : series)
        for (double s : rep->snrs()) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    if (!(hi > lo)) {
        lo -= 1;
        hi += 1;
    }
    auto px = [&](double snr) { return left + (snr - lo) / (hi - lo) * (W - left - right); };
    auto py = [&](double acc) { return top + (100.0 - acc) / 100.0 * (H - top - bottom); };
    static const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

    std::ostringstream os;
    os << std::fixed << std::setprecision(1);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<g stroke=\"#444\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom << "\"/>\n";
    os << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom << "\"/>\n";
    for (int a = 0; a <= 100; a += 20)
        os << "<text stroke=\"none\" x=\"" << left - 8 << "\" y=\"" << py(a) + 4 << "\" text-anchor=\"end\">" << a
           << "</text>\n";
    if (!series.empty())
        for (double s : series.front().second->snrs())
            os << "<text stroke=\"none\" x=\"" << px(s) << "\" y=\"" << H - bottom + 16 << "\" text-anchor=\"middle\">"
               << dataset::snr_dir_name(s).substr(4) << "</text>\n";
    os << "<text stroke=\"none\" x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 10
       << "\" text-anchor=\"middle\">SNR (dB)</text>\n";
    os << "<text stroke=\"none\" x=\"14\" y=\"" << (top + H - bottom) / 2
       << "\" transform=\"rotate(-90 14 " << (top + H - bottom) / 2 << ")\" text-anchor=\"middle\">accuracy (%)</text>\n";
    os << "</g>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& [name, rep] = series[i];
        const char* color = colors[i % std::size(colors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (const auto& r : rep->results) os << px(r.snr_db) << ',' << py(r.accuracy_pct) << ' ';
        os << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(i);
        os << "<line x1=\"" << W - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - right + 30 << "\" y2=\"" << ly
           << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << W - right + 36 << "\" y=\"" << ly + 4
           << "\" font-family=\"sans-serif\" font-size=\"11\">" << name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace aimc::eval
