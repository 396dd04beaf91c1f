#include "vball/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "vball/hash.hpp"
#include "vball/rng.hpp"
#include "json.hpp"

namespace vball::classifier {

int class_index(const std::string& name) {
    for (int i = 0; i < kNumClasses; ++i) {
        if (name == kClassNames[i]) return i;
    }
    throw UnknownClass(name);
}

void KernelSpec::validate() const {
    if ((kind == KernelKind::Rbf || kind == KernelKind::Polynomial ||
         kind == KernelKind::Sigmoid) && gamma <= 0.0)
        throw ConfigInvalid("kernel gamma must be positive");
    if (kind == KernelKind::Polynomial && degree < 1)
        throw ConfigInvalid("polynomial degree must be >= 1");
}

KernelKind kernel_from_name(const std::string& name) {
    if (name == "linear") return KernelKind::Linear;
    if (name == "rbf") return KernelKind::Rbf;
    if (name == "polynomial" || name == "poly") return KernelKind::Polynomial;
    if (name == "sigmoid") return KernelKind::Sigmoid;
    throw ConfigInvalid("unknown kernel: " + name);
}

const char* kernel_name(KernelKind k) {
    switch (k) {
        case KernelKind::Linear: return "linear";
        case KernelKind::Rbf: return "rbf";
        case KernelKind::Polynomial: return "polynomial";
        case KernelKind::Sigmoid: return "sigmoid";
    }
    return "?";
}

std::string KernelSpec::describe() const {
    std::string s = kernel_name(kind);
    if (kind != KernelKind::Linear) s += " gamma=" + std::to_string(gamma);
    if (kind == KernelKind::Polynomial)
        s += " degree=" + std::to_string(degree) + " coef0=" + std::to_string(coef0);
    if (kind == KernelKind::Sigmoid) s += " coef0=" + std::to_string(coef0);
    return s;
}

double kernel_eval(const KernelSpec& spec, const std::vector<double>& x,
                   const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionMismatch("kernel_eval");
    double dot = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
    switch (spec.kind) {
        case KernelKind::Linear:
            return dot;
        case KernelKind::Rbf: {
            double sq = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] - y[i];
                sq += d * d;
            }
            return std::exp(-spec.gamma * sq);
        }
        case KernelKind::Polynomial:
            return std::pow(spec.gamma * dot + spec.coef0, spec.degree);
        case KernelKind::Sigmoid:
            return std::tanh(spec.gamma * dot + spec.coef0);
    }
    return 0.0;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd rows_to_matrix(const std::vector<std::vector<double>>& x) {
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    const Eigen::Index d = n > 0 ? static_cast<Eigen::Index>(x[0].size()) : 0;
    MatrixXd m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(x[i].size()) != d)
            throw DimensionMismatch("feature rows have differing widths");
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = x[i][j];
    }
    return m;
}

MatrixXd kernel_matrix(const MatrixXd& x, const KernelSpec& spec) {
    MatrixXd g = x * x.transpose();
    switch (spec.kind) {
        case KernelKind::Linear:
            return g;
        case KernelKind::Rbf: {
            const VectorXd sq = g.diagonal();
            for (Eigen::Index i = 0; i < g.rows(); ++i) {
                for (Eigen::Index j = 0; j < g.cols(); ++j) {
                    g(i, j) = std::exp(-spec.gamma * (sq(i) + sq(j) - 2.0 * g(i, j)));
                }
            }
            return g;
        }
        case KernelKind::Polynomial:
            return ((spec.gamma * g.array() + spec.coef0).pow(spec.degree)).matrix();
        case KernelKind::Sigmoid:
            return ((spec.gamma * g.array() + spec.coef0).tanh()).matrix();
    }
    return g;
}

// Kernel rows between probe points and training points, evaluated in batch.
MatrixXd kernel_cross(const MatrixXd& probe, const MatrixXd& train, const KernelSpec& spec) {
    MatrixXd g = probe * train.transpose();
    switch (spec.kind) {
        case KernelKind::Linear:
            return g;
        case KernelKind::Rbf: {
            const VectorXd sp = probe.rowwise().squaredNorm();
            const VectorXd st = train.rowwise().squaredNorm();
            for (Eigen::Index i = 0; i < g.rows(); ++i) {
                for (Eigen::Index j = 0; j < g.cols(); ++j) {
                    g(i, j) = std::exp(-spec.gamma * (sp(i) + st(j) - 2.0 * g(i, j)));
                }
            }
            return g;
        }
        case KernelKind::Polynomial:
            return ((spec.gamma * g.array() + spec.coef0).pow(spec.degree)).matrix();
        case KernelKind::Sigmoid:
            return ((spec.gamma * g.array() + spec.coef0).tanh()).matrix();
    }
    return g;
}

struct SmoResult {
    std::vector<double> alpha;
    double rho = 0.0;
    double dual_objective = 0.0;
    int iterations = 0;
};

// LIBSVM-style solver on a precomputed kernel matrix.
SmoResult solve_smo(const MatrixXd& k, const std::vector<int>& y,
                    const std::vector<double>& c_per_sample, double tol) {
    const int n = static_cast<int>(y.size());
    constexpr double kTau = 1e-12;
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // gradient of the dual objective
    const long long max_iter = std::max(10000000LL, 100LL * n);

    auto q = [&](int i, int j) { return y[i] * y[j] * k(i, j); };

    int iter = 0;
    for (; iter < max_iter; ++iter) {
        // maximal violating pair
        double m_up = -std::numeric_limits<double>::infinity();
        double m_low = std::numeric_limits<double>::infinity();
        int i = -1, j = -1;
        for (int t = 0; t < n; ++t) {
            const bool in_up = (y[t] == +1 && alpha[t] < c_per_sample[t]) ||
                               (y[t] == -1 && alpha[t] > 0.0);
            const bool in_low = (y[t] == -1 && alpha[t] < c_per_sample[t]) ||
                                (y[t] == +1 && alpha[t] > 0.0);
            const double v = -y[t] * grad[t];
            if (in_up && v > m_up) {
                m_up = v;
                i = t;
            }
            if (in_low && v < m_low) {
                m_low = v;
                j = t;
            }
        }
        if (i < 0 || j < 0 || m_up - m_low < tol) break;

        const double ci = c_per_sample[i], cj = c_per_sample[j];
        const double old_ai = alpha[i], old_aj = alpha[j];
        if (y[i] != y[j]) {
            double quad = k(i, i) + k(j, j) + 2.0 * k(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0 && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = diff;
            } else if (diff <= 0.0 && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > ci - cj && alpha[i] > ci) {
                alpha[i] = ci;
                alpha[j] = ci - diff;
            } else if (diff <= ci - cj && alpha[j] > cj) {
                alpha[j] = cj;
                alpha[i] = cj + diff;
            }
        } else {
            double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > ci && alpha[i] > ci) {
                alpha[i] = ci;
                alpha[j] = sum - ci;
            } else if (sum <= ci && alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > cj && alpha[j] > cj) {
                alpha[j] = cj;
                alpha[i] = sum - cj;
            } else if (sum <= cj && alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double dai = alpha[i] - old_ai;
        const double daj = alpha[j] - old_aj;
        if (dai == 0.0 && daj == 0.0) break;  // numerically stuck
        for (int t = 0; t < n; ++t) grad[t] += q(t, i) * dai + q(t, j) * daj;
    }

    // rho from free points, falling back to the violation midpoint
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int n_free = 0;
    for (int t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c_per_sample[t]) {
            if (y[t] == -1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] == +1)
                ub = std::min(ub, yg);
            else
                lb = std::max(lb, yg);
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    SmoResult r;
    r.alpha = std::move(alpha);
    r.rho = n_free > 0 ? sum_free / n_free : (ub + lb) / 2.0;
    double obj = 0.0;
    for (int t = 0; t < n; ++t) obj += r.alpha[t] * (grad[t] - 1.0) / 2.0;
    r.dual_objective = -obj;  // value of the maximized dual
    r.iterations = iter;
    return r;
}

BinarySvm train_binary_on_matrix(const MatrixXd& k,
                                 const std::vector<std::vector<double>>& x,
                                 const std::vector<int>& y, double c,
                                 const KernelSpec& spec, double tol,
                                 double pos_weight, double neg_weight) {
    spec.validate();
    if (c <= 0.0) throw ConfigInvalid("svm cost must be positive");
    bool has_pos = false, has_neg = false;
    for (int v : y) {
        if (v == +1) has_pos = true;
        else if (v == -1) has_neg = true;
        else throw ConfigInvalid("labels must be +1/-1");
    }
    if (!has_pos || !has_neg) throw SingleClassData("train_binary");

    std::vector<double> c_per_sample(y.size());
    for (std::size_t t = 0; t < y.size(); ++t)
        c_per_sample[t] = c * (y[t] == +1 ? pos_weight : neg_weight);
    const SmoResult r = solve_smo(k, y, c_per_sample, tol);

    BinarySvm svm;
    svm.kernel = spec;
    svm.c = c;
    svm.bias = -r.rho;
    svm.dual_objective = r.dual_objective;
    svm.iterations = r.iterations;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (r.alpha[t] > 0.0) {
            svm.support_vectors.push_back(x[t]);
            svm.alpha_y.push_back(r.alpha[t] * y[t]);
        }
    }
    return svm;
}

}  // namespace

BinarySvm train_binary(const std::vector<std::vector<double>>& x,
                       const std::vector<int>& y, double c, const KernelSpec& spec,
                       double tol, std::uint64_t /*seed*/, double pos_weight,
                       double neg_weight) {
    if (x.size() != y.size() || x.empty())
        throw DimensionMismatch("train_binary: data/label size mismatch");
    const MatrixXd xm = rows_to_matrix(x);
    const MatrixXd k = kernel_matrix(xm, spec);
    return train_binary_on_matrix(k, x, y, c, spec, tol, pos_weight, neg_weight);
}

double decision(const BinarySvm& svm, const std::vector<double>& x) {
    double f = svm.bias;
    for (std::size_t s = 0; s < svm.support_vectors.size(); ++s) {
        f += svm.alpha_y[s] * kernel_eval(svm.kernel, svm.support_vectors[s], x);
    }
    return f;
}

int predict(const BinarySvm& svm, const std::vector<double>& x) {
    return decision(svm, x) >= 0.0 ? +1 : -1;
}

SigmoidCalibrator calibrate_decisions(const std::vector<double>& decisions,
                                      const std::vector<int>& y) {
    if (decisions.size() != y.size())
        throw DimensionMismatch("calibrate: decision/label size mismatch");
    double prior1 = 0.0, prior0 = 0.0;
    for (int v : y) (v == +1 ? prior1 : prior0) += 1.0;
    if (prior1 == 0.0 || prior0 == 0.0) {
        // degenerate validation: fixed fallback slope
        return {-1.0, 0.0, ""};
    }

    // Platt scaling with smoothed targets, robust Newton (Lin/Weng/Platt).
    const std::size_t n = decisions.size();
    const double hi = (prior1 + 1.0) / (prior1 + 2.0);
    const double lo = 1.0 / (prior0 + 2.0);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] == +1 ? hi : lo;

    double a = 0.0;
    double b = std::log((prior0 + 1.0) / (prior1 + 1.0));
    auto objective = [&](double aa, double bb) {
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = aa * decisions[i] + bb;
            if (f >= 0.0)
                err += t[i] * f + std::log1p(std::exp(-f));
            else
                err += (t[i] - 1.0) * f + std::log1p(std::exp(f));
        }
        return err;
    };
    double fval = objective(a, b);
    constexpr int kMaxIter = 100;
    constexpr double kMinStep = 1e-10;
    constexpr double kSigma = 1e-12;
    for (int it = 0; it < kMaxIter; ++it) {
        double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double f = a * decisions[i] + b;
            double p, q;
            if (f >= 0.0) {
                p = std::exp(-f) / (1.0 + std::exp(-f));
                q = 1.0 / (1.0 + std::exp(-f));
            } else {
                p = 1.0 / (1.0 + std::exp(f));
                q = std::exp(f) / (1.0 + std::exp(f));
            }
            const double d2 = p * q;
            h11 += decisions[i] * decisions[i] * d2;
            h22 += d2;
            h21 += decisions[i] * d2;
            const double d1 = t[i] - p;
            g1 += decisions[i] * d1;
            g2 += d1;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;
        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;
        double step = 1.0;
        while (step >= kMinStep) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = objective(na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                break;
            }
            step /= 2.0;
        }
        if (step < kMinStep) break;
    }
    return {a, b, ""};
}

SigmoidCalibrator calibrate(const BinarySvm& svm,
                            const std::vector<std::vector<double>>& x,
                            const std::vector<int>& y) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = decision(svm, x[i]);
    return calibrate_decisions(d, y);
}

double calibrated_score(const SigmoidCalibrator& cal, double decision_value) {
    const double f = cal.a * decision_value + cal.b;
    if (f >= 0.0) return std::exp(-f) / (1.0 + std::exp(-f));
    return 1.0 / (1.0 + std::exp(f));
}

namespace {

MulticlassModel train_multiclass_impl(const std::vector<std::vector<double>>& x,
                                      const std::vector<int>& labels,
                                      const SvmConfig& cfg,
                                      const std::vector<features::BlockSpan>& layout,
                                      bool require_all_classes) {
    if (x.size() != labels.size() || x.empty())
        throw DimensionMismatch("train_multiclass: data/label size mismatch");
    std::array<int, kNumClasses> counts{};
    for (int l : labels) {
        if (l < 0 || l >= kNumClasses) throw UnknownClass(std::to_string(l));
        ++counts[l];
    }
    if (require_all_classes) {
        for (int cls = 0; cls < kNumClasses; ++cls) {
            if (counts[cls] == 0)
                throw MissingClass(std::string(kClassNames[cls]) + " absent from training data");
        }
    }

    MulticlassModel m;
    m.config = cfg;
    m.layout = layout;
    m.layout_hash = features::layout_hash(layout);
    m.normalizer = features::fit_normalizer(x);
    std::vector<std::vector<double>> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = apply_normalizer(m.normalizer, x[i]);

    const MatrixXd zm = rows_to_matrix(z);
    const MatrixXd k = kernel_matrix(zm, cfg.kernel);

    const int n = static_cast<int>(labels.size());
    m.machines.resize(kNumClasses);
    m.calibrators.resize(kNumClasses);
    for (int cls = 0; cls < kNumClasses; ++cls) {
        if (counts[cls] == 0 || counts[cls] == n) {
            // untrainable one-vs-rest split; an empty machine scores 0
            m.machines[cls] = BinarySvm{};
            m.machines[cls].kernel = cfg.kernel;
            m.calibrators[cls] = {-1.0, 0.0, ""};
            continue;
        }
        std::vector<int> y(n);
        for (int i = 0; i < n; ++i) y[i] = labels[i] == cls ? +1 : -1;
        double pw = 1.0, nw = 1.0;
        if (cfg.class_weights) {
            pw = n / (2.0 * counts[cls]);
            nw = n / (2.0 * (n - counts[cls]));
        }
        m.machines[cls] =
            train_binary_on_matrix(k, z, y, cfg.c, cfg.kernel, cfg.tol, pw, nw);
        std::vector<double> d(n);
        for (int i = 0; i < n; ++i) d[i] = decision(m.machines[cls], z[i]);
        m.calibrators[cls] = calibrate_decisions(d, y);
    }
    return m;
}

}  // namespace

MulticlassModel train_multiclass(const std::vector<std::vector<double>>& x,
                                 const std::vector<int>& labels, const SvmConfig& cfg,
                                 const std::vector<features::BlockSpan>& layout) {
    return train_multiclass_impl(x, labels, cfg, layout, true);
}

std::array<double, kNumClasses> predict_scores(const MulticlassModel& m,
                                               const std::vector<double>& x) {
    const std::vector<double> z = apply_normalizer(m.normalizer, x);
    std::array<double, kNumClasses> scores{};
    for (int cls = 0; cls < kNumClasses; ++cls) {
        if (m.machines[cls].support_vectors.empty()) {
            scores[cls] = 0.0;
            continue;
        }
        scores[cls] = calibrated_score(m.calibrators[cls], decision(m.machines[cls], z));
    }
    return scores;
}

int predict_class(const MulticlassModel& m, const std::vector<double>& x) {
    const auto scores = predict_scores(m, x);
    int best = 0;
    for (int cls = 1; cls < kNumClasses; ++cls) {
        if (scores[cls] > scores[best]) best = cls;  // ties keep the earlier class
    }
    return best;
}

std::vector<std::array<double, kNumClasses>> predict_scores_batch(
    const MulticlassModel& m, const std::vector<std::vector<double>>& rows) {
    std::vector<std::array<double, kNumClasses>> out(rows.size());
    if (rows.empty()) return out;
    std::vector<std::vector<double>> z(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        z[i] = apply_normalizer(m.normalizer, rows[i]);
    const MatrixXd zm = rows_to_matrix(z);
    for (int cls = 0; cls < kNumClasses; ++cls) {
        const auto& svm = m.machines[cls];
        if (svm.support_vectors.empty()) {
            for (auto& s : out) s[cls] = 0.0;
            continue;
        }
        const MatrixXd sv = rows_to_matrix(svm.support_vectors);
        const MatrixXd cross = kernel_cross(zm, sv, svm.kernel);
        Eigen::Map<const VectorXd> ay(svm.alpha_y.data(),
                                      static_cast<Eigen::Index>(svm.alpha_y.size()));
        const VectorXd dec = cross * ay;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            out[i][cls] = calibrated_score(m.calibrators[cls],
                                           dec(static_cast<Eigen::Index>(i)) + svm.bias);
        }
    }
    return out;
}

std::vector<int> predict_class_batch(const MulticlassModel& m,
                                     const std::vector<std::vector<double>>& rows) {
    const auto scores = predict_scores_batch(m, rows);
    std::vector<int> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        int best = 0;
        for (int cls = 1; cls < kNumClasses; ++cls) {
            if (scores[i][cls] > scores[i][best]) best = cls;
        }
        out[i] = best;
    }
    return out;
}

std::vector<double> select_blocks(const std::vector<double>& row,
                                  const std::vector<features::BlockSpan>& layout,
                                  const std::set<features::Block>& mask) {
    if (mask.empty()) throw EmptyMask("select_blocks");
    std::vector<double> out;
    for (const auto& span : layout) {
        if (!mask.count(span.block)) continue;
        out.insert(out.end(), row.begin() + span.offset,
                   row.begin() + span.offset + span.length);
    }
    return out;
}

std::vector<features::BlockSpan> masked_layout(
    const std::vector<features::BlockSpan>& layout,
    const std::set<features::Block>& mask) {
    std::vector<features::BlockSpan> out;
    std::size_t offset = 0;
    for (const auto& span : layout) {
        if (!mask.count(span.block)) continue;
        out.push_back({span.block, offset, span.length});
        offset += span.length;
    }
    return out;
}

namespace {

double fold_macro_accuracy(const MulticlassModel& model,
                           const std::vector<std::vector<double>>& x,
                           const std::vector<int>& labels) {
    std::array<int, kNumClasses> correct{}, total{};
    const auto predictions = predict_class_batch(model, x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        ++total[labels[i]];
        if (predictions[i] == labels[i]) ++correct[labels[i]];
    }
    double sum = 0.0;
    int classes = 0;
    for (int cls = 0; cls < kNumClasses; ++cls) {
        if (total[cls] == 0) continue;
        sum += static_cast<double>(correct[cls]) / total[cls];
        ++classes;
    }
    return classes > 0 ? sum / classes : 0.0;
}

}  // namespace

GridSearchResult grid_search(const std::vector<std::vector<double>>& x,
                             const std::vector<int>& labels,
                             const std::vector<features::BlockSpan>& layout,
                             const std::vector<GridCell>& cells, std::uint64_t seed,
                             const std::vector<int>& group_ids, double tol) {
    if (cells.empty()) throw EmptyGrid("grid_search: no cells");
    if (x.size() != labels.size() || x.empty())
        throw DimensionMismatch("grid_search: data/label size mismatch");
    constexpr int kFolds = 3;

    std::vector<int> groups = group_ids;
    if (groups.empty()) {
        groups.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) groups[i] = static_cast<int>(i);
    }
    if (groups.size() != x.size())
        throw DimensionMismatch("grid_search: group id count");

    // stratified fold assignment at group granularity: a group's class is the
    // class of its rows (groups are single-class by construction upstream)
    std::map<int, int> group_class;
    for (std::size_t i = 0; i < x.size(); ++i) {
        group_class.emplace(groups[i], labels[i]);
    }
    std::array<std::vector<int>, kNumClasses> groups_by_class;
    for (const auto& [gid, cls] : group_class) groups_by_class[cls].push_back(gid);
    Rng rng(seed);
    std::map<int, int> fold_of_group;
    for (int cls = 0; cls < kNumClasses; ++cls) {
        auto& gs = groups_by_class[cls];
        std::sort(gs.begin(), gs.end());
        rng.shuffle(gs);
        for (std::size_t i = 0; i < gs.size(); ++i)
            fold_of_group[gs[i]] = static_cast<int>(i % kFolds);
    }

    GridSearchResult result;
    double best_mean = -1.0;
    for (const auto& cell : cells) {
        double mean = 0.0;
        for (int fold = 0; fold < kFolds; ++fold) {
            std::vector<std::vector<double>> xtr, xte;
            std::vector<int> ytr, yte;
            for (std::size_t i = 0; i < x.size(); ++i) {
                auto masked = select_blocks(x[i], layout, cell.mask);
                if (fold_of_group[groups[i]] == fold) {
                    xte.push_back(std::move(masked));
                    yte.push_back(labels[i]);
                } else {
                    xtr.push_back(std::move(masked));
                    ytr.push_back(labels[i]);
                }
            }
            double acc = 0.0;
            if (!xtr.empty() && !xte.empty()) {
                SvmConfig cfg;
                cfg.kernel = cell.kernel;
                cfg.c = cell.c;
                cfg.tol = tol;
                cfg.seed = seed;
                const auto model = train_multiclass_impl(
                    xtr, ytr, cfg, masked_layout(layout, cell.mask), false);
                acc = fold_macro_accuracy(model, xte, yte);
            }
            result.table.push_back({cell, fold, acc});
            mean += acc;
        }
        mean /= kFolds;
        if (mean > best_mean) {
            best_mean = mean;
            result.best = cell;
        }
    }
    result.best_mean_macro = best_mean;
    return result;
}

namespace {

nlohmann::json kernel_to_json(const KernelSpec& k) {
    return {{"kind", kernel_name(k.kind)},
            {"gamma", k.gamma},
            {"degree", k.degree},
            {"coef0", k.coef0}};
}

KernelSpec kernel_from_json(const nlohmann::json& j) {
    KernelSpec k;
    k.kind = kernel_from_name(j.at("kind"));
    k.gamma = j.at("gamma");
    k.degree = j.at("degree");
    k.coef0 = j.at("coef0");
    return k;
}

}  // namespace

std::string multiclass_to_json(const MulticlassModel& m) {
    nlohmann::json j;
    j["classes"] = kClassNames;
    j["layout_hash"] = m.layout_hash;
    j["provenance"] = m.provenance;
    j["config"] = {{"kernel", kernel_to_json(m.config.kernel)},
                   {"c", m.config.c},
                   {"tol", m.config.tol},
                   {"seed", m.config.seed},
                   {"class_weights", m.config.class_weights}};
    for (const auto& span : m.layout) {
        j["layout"].push_back({{"block", features::block_name(span.block)},
                               {"offset", span.offset},
                               {"length", span.length}});
    }
    j["normalizer"] = {{"mean", m.normalizer.mean},
                       {"scale", m.normalizer.scale},
                       {"provenance", m.normalizer.provenance}};
    j["machines"] = nlohmann::json::array();
    for (int cls = 0; cls < kNumClasses; ++cls) {
        const auto& svm = m.machines[cls];
        nlohmann::json jm;
        jm["kernel"] = kernel_to_json(svm.kernel);
        jm["c"] = svm.c;
        jm["bias"] = svm.bias;
        jm["alpha_y"] = svm.alpha_y;
        jm["support_vectors"] = svm.support_vectors;
        jm["calibrator"] = {{"a", m.calibrators[cls].a},
                            {"b", m.calibrators[cls].b},
                            {"provenance", m.calibrators[cls].provenance}};
        j["machines"].push_back(std::move(jm));
    }
    return j.dump();
}

MulticlassModel multiclass_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MulticlassModel m;
    m.layout_hash = j.at("layout_hash");
    m.provenance = j.value("provenance", "");
    m.config.kernel = kernel_from_json(j.at("config").at("kernel"));
    m.config.c = j.at("config").at("c");
    m.config.tol = j.at("config").at("tol");
    m.config.seed = j.at("config").at("seed");
    m.config.class_weights = j.at("config").at("class_weights");
    if (j.contains("layout")) {
        for (const auto& js : j.at("layout")) {
            m.layout.push_back({features::block_from_name(js.at("block")),
                                js.at("offset"), js.at("length")});
        }
    }
    m.normalizer.mean = j.at("normalizer").at("mean").get<std::vector<double>>();
    m.normalizer.scale = j.at("normalizer").at("scale").get<std::vector<double>>();
    m.normalizer.provenance = j.at("normalizer").value("provenance", "");
    for (const auto& jm : j.at("machines")) {
        BinarySvm svm;
        svm.kernel = kernel_from_json(jm.at("kernel"));
        svm.c = jm.at("c");
        svm.bias = jm.at("bias");
        svm.alpha_y = jm.at("alpha_y").get<std::vector<double>>();
        svm.support_vectors =
            jm.at("support_vectors").get<std::vector<std::vector<double>>>();
        m.machines.push_back(std::move(svm));
        const auto& jc = jm.at("calibrator");
        m.calibrators.push_back({jc.at("a"), jc.at("b"), jc.value("provenance", "")});
    }
    return m;
}

}  // namespace vball::classifier
