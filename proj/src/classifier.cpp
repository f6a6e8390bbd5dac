#include "typocorpus/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include <json.hpp>

#include "typocorpus/errors.hpp"
#include "typocorpus/features.hpp"
#include "typocorpus/metrics.hpp"

namespace typocorpus {
namespace {

using Vec4 = std::array<double, 4>;

Vec4 to_vec(const ClassifierWeights& w) { return {w.w_ppl, w.w_dist, w.w_num, w.bias}; }
ClassifierWeights from_vec(const Vec4& v) { return {v[0], v[1], v[2], v[3]}; }
Vec4 row(const FeatureVector& f) { return {f.ppl_ratio, f.norm_dist, static_cast<double>(f.numeric_only), 1.0}; }

double dot(const Vec4& a, const Vec4& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double loss_at(const Vec4& w, const std::vector<LabeledExample>& data) {
    double sum = 0.0;
    for (const auto& ex : data) {
        const double z = dot(w, row(ex.features));
        sum += softplus(z) - (ex.label ? z : 0.0);
    }
    return sum / static_cast<double>(data.size());
}

// Solves H d = -g by Cholesky. Returns false when H is not safely positive
// definite.
bool newton_direction(const std::array<Vec4, 4>& h, const Vec4& g, Vec4& d) {
    std::array<Vec4, 4> l{};
    double max_diag = 0.0;
    for (int i = 0; i < 4; ++i) max_diag = std::max(max_diag, h[i][i]);
    if (!(max_diag > 0.0)) return false;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = h[i][j];
            for (int k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
            if (i == j) {
                if (s <= 1e-12 * max_diag) return false;
                l[i][i] = std::sqrt(s);
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    Vec4 y{};
    for (int i = 0; i < 4; ++i) {
        double s = -g[i];
        for (int k = 0; k < i; ++k) s -= l[i][k] * y[k];
        y[i] = s / l[i][i];
    }
    for (int i = 3; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < 4; ++k) s -= l[k][i] * d[k];
        d[i] = s / l[i][i];
    }
    return std::all_of(d.begin(), d.end(), [](double v) { return std::isfinite(v); });
}

void check_trainable(const std::vector<LabeledExample>& data) {
    if (data.size() < 10) throw DataError("training needs at least 10 examples, got " + std::to_string(data.size()));
    const auto pos = std::count_if(data.begin(), data.end(), [](const LabeledExample& e) { return e.label; });
    if (pos == 0 || static_cast<std::size_t>(pos) == data.size())
        throw DataError("training data holds a single class");
}

bool single_class(const std::vector<LabeledExample>& data) {
    const auto pos = std::count_if(data.begin(), data.end(), [](const LabeledExample& e) { return e.label; });
    return pos == 0 || static_cast<std::size_t>(pos) == data.size();
}

}  // namespace

double sigmoid(double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Saturated logits would round to exactly 0 or 1; scores stay strictly inside.
double predict(const ClassifierWeights& w, const FeatureVector& f) {
    constexpr double eps = 0x1p-53;
    return std::clamp(sigmoid(dot(to_vec(w), row(f))), eps, 1.0 - eps);
}

double log_loss(const ClassifierWeights& w, const std::vector<LabeledExample>& data) {
    if (data.empty()) return 0.0;
    return loss_at(to_vec(w), data);
}

std::array<double, 4> log_loss_gradient(const ClassifierWeights& w, const std::vector<LabeledExample>& data) {
    Vec4 g{};
    if (data.empty()) return g;
    const Vec4 wv = to_vec(w);
    for (const auto& ex : data) {
        const Vec4 x = row(ex.features);
        const double r = sigmoid(dot(wv, x)) - (ex.label ? 1.0 : 0.0);
        for (int i = 0; i < 4; ++i) g[i] += r * x[i];
    }
    for (auto& v : g) v /= static_cast<double>(data.size());
    return g;
}

ClassifierWeights train(const std::vector<LabeledExample>& data, const TrainOptions& opts, TrainReport* report) {
    check_trainable(data);
    const double n = static_cast<double>(data.size());
    Vec4 w{};
    double loss = loss_at(w, data);
    TrainReport rep;
    rep.loss_history.push_back(loss);

    std::size_t it = 0;
    for (; it < opts.max_iter; ++it) {
        Vec4 g{};
        std::array<Vec4, 4> h{};
        for (const auto& ex : data) {
            const Vec4 x = row(ex.features);
            const double p = sigmoid(dot(w, x));
            const double r = p - (ex.label ? 1.0 : 0.0);
            const double s = p * (1.0 - p);
            for (int i = 0; i < 4; ++i) {
                g[i] += r * x[i] / n;
                for (int j = 0; j < 4; ++j) h[i][j] += s * x[i] * x[j] / n;
            }
        }
        Vec4 d{};
        if (!newton_direction(h, g, d) || dot(d, g) >= 0.0)
            for (int i = 0; i < 4; ++i) d[i] = -g[i];
        const double slope = dot(d, g);
        if (slope >= 0.0) break;  // zero gradient

        double step = 1.0;
        double next_loss = loss;
        Vec4 next = w;
        bool accepted = false;
        for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
            for (int i = 0; i < 4; ++i) next[i] = w[i] + step * d[i];
            next_loss = loss_at(next, data);
            if (!std::isfinite(next_loss)) throw DataError("training loss is not finite");
            if (next_loss <= loss + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        const double improvement = loss - next_loss;
        w = next;
        loss = next_loss;
        rep.loss_history.push_back(loss);
        if (improvement < opts.tol) {
            ++it;
            break;
        }
    }
    if (!std::isfinite(loss)) throw DataError("training loss is not finite");

    const ClassifierWeights out = from_vec(w);
    if (report) {
        rep.iterations = it;
        rep.hit_max_iter = it >= opts.max_iter;
        rep.final_loss = loss;
        const auto g = log_loss_gradient(out, data);
        rep.gradient_norm = std::sqrt(dot(g, g));
        *report = std::move(rep);
    }
    return out;
}

std::vector<std::vector<std::size_t>> stratified_folds(const std::vector<LabeledExample>& data, std::size_t k,
                                                       std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    std::vector<std::size_t> pos;
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < data.size(); ++i) (data[i].label ? pos : neg).push_back(i);

    // Fisher-Yates driven directly by the engine so fold assignment does not
    // depend on the standard library's distribution implementations.
    std::mt19937_64 rng(seed);
    auto shuffle = [&rng](std::vector<std::size_t>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
    };
    shuffle(pos);
    shuffle(neg);

    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t next = 0;
    for (std::size_t idx : pos) folds[next++ % k].push_back(idx);
    for (std::size_t idx : neg) folds[next++ % k].push_back(idx);
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

PrfScores evaluate_folds(const std::vector<LabeledExample>& data, const std::vector<std::vector<std::size_t>>& folds,
                         const Trainer& trainer) {
    PrfScores sum;
    if (folds.empty()) return sum;
    std::vector<char> held(data.size());
    for (const auto& fold : folds) {
        std::fill(held.begin(), held.end(), 0);
        for (std::size_t i : fold) held[i] = 1;
        std::vector<LabeledExample> train_part;
        for (std::size_t i = 0; i < data.size(); ++i)
            if (!held[i]) train_part.push_back(data[i]);
        const Predictor predictor = trainer(train_part);
        ConfusionCounts c;
        for (std::size_t i : fold) {
            const bool guess = predictor(data[i].features);
            if (guess && data[i].label) ++c.tp;
            else if (guess) ++c.fp;
            else if (data[i].label) ++c.fn;
        }
        const Prf s = precision_recall_fbeta(c, 1.0);
        sum.precision += s.precision;
        sum.recall += s.recall;
        sum.f1 += s.f;
    }
    const double k = static_cast<double>(folds.size());
    return {sum.precision / k, sum.recall / k, sum.f1 / k};
}

PrfScores cross_validate(const std::vector<LabeledExample>& data, std::size_t k, std::uint64_t seed,
                         const TrainOptions& opts) {
    if (data.size() < k) throw DataError("cross-validation needs at least k examples");
    if (single_class(data)) throw DataError("cross-validation data holds a single class");

    auto usable = [&](const std::vector<std::vector<std::size_t>>& folds) {
        std::vector<LabeledExample> part;
        for (const auto& fold : folds) {
            part.clear();
            std::vector<char> held(data.size());
            for (std::size_t i : fold) held[i] = 1;
            for (std::size_t i = 0; i < data.size(); ++i)
                if (!held[i]) part.push_back(data[i]);
            if (part.size() < 10 || single_class(part)) return false;
        }
        return true;
    };
    auto folds = stratified_folds(data, k, seed);
    if (!usable(folds)) {
        folds = stratified_folds(data, k, seed ^ 0x9e3779b97f4a7c15ULL);
        if (!usable(folds)) throw DataError("a cross-validation fold has an unusable training part");
    }
    const Trainer trainer = [&opts](const std::vector<LabeledExample>& part) -> Predictor {
        const ClassifierWeights w = train(part, opts);
        return [w](const FeatureVector& f) { return predict(w, f) >= kTypoDecisionThreshold; };
    };
    return evaluate_folds(data, folds, trainer);
}

void save_weights(const WeightsFile& w, const std::filesystem::path& file) {
    nlohmann::ordered_json j;
    j["w_ppl"] = w.weights.w_ppl;
    j["w_dist"] = w.weights.w_dist;
    j["w_num"] = w.weights.w_num;
    j["bias"] = w.weights.bias;
    j["trained_on"] = w.trained_on;
    j["seed"] = w.seed;
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("cannot write " + file.string());
}

WeightsFile load_weights(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, file.string() + ": " + e.what());
    }
    WeightsFile out;
    try {
        out.weights.w_ppl = j.at("w_ppl").get<double>();
        out.weights.w_dist = j.at("w_dist").get<double>();
        out.weights.w_num = j.at("w_num").get<double>();
        out.weights.bias = j.at("bias").get<double>();
        out.trained_on = j.value("trained_on", std::string());
        out.seed = j.value("seed", kDefaultSeed);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(file.string() + ": " + e.what());
    }
    for (double v : to_vec(out.weights))
        if (!std::isfinite(v)) throw ValidationError("weights", file.string() + ": weights must be finite");
    return out;
}

void label_record(CommitRecord& rec, const ClassifierWeights& w, LabelStats* stats) {
    for (auto& e : rec.edits) {
        if (stats) ++stats->edits;
        std::optional<FeatureVector> f = e.features ? e.features : features_from_perplexities(e);
        if (!f) {
            if (stats) ++stats->unlabeled;
            continue;
        }
        const double p = predict(w, *f);
        e.prob_typo = p;
        e.is_typo = p >= kTypoDecisionThreshold;
        if (stats) ++stats->labeled;
    }
}

}  // namespace typocorpus
