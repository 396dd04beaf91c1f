#include "vball/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "vball/rng.hpp"
#include "json.hpp"

namespace vball::segmentation {

namespace {
constexpr double kVarFloor = 1e-6;
constexpr double kTwoPiCubed = 248.05021344239853;  // (2*pi)^3

double component_peak(const GmmComponent& c) {
    return 1.0 / std::sqrt(kTwoPiCubed * c.var[0] * c.var[1] * c.var[2]);
}
}  // namespace

Image ProbabilityMap::to_image() const {
    Image img(width, height, 1);
    for (std::size_t i = 0; i < v.size(); ++i) img.data[i] = static_cast<float>(v[i]);
    return img;
}

double ColorModel::reference_density() const {
    double d0 = 0.0;
    for (const auto& c : components) d0 += c.weight * component_peak(c);
    return d0 * std::exp(-0.5);
}

double ColorModel::density(const std::array<double, 3>& rgb) const {
    double d = 0.0;
    for (const auto& c : components) {
        double maha = 0.0;
        for (int ch = 0; ch < 3; ++ch) {
            const double diff = rgb[ch] - c.mean[ch];
            maha += diff * diff / c.var[ch];
        }
        d += c.weight * component_peak(c) * std::exp(-0.5 * maha);
    }
    return d;
}

BackgroundModel build_background(const std::vector<Frame>& frames) {
    if (frames.size() < 3) throw InsufficientSamples("background needs >= 3 frames");
    for (const auto& f : frames) require_same_shape(frames.front(), f, "build_background");
    const Frame& first = frames.front();
    BackgroundModel bg(first.width, first.height, first.channels);
    std::vector<float> column(frames.size());
    const std::size_t n = first.data.size();
    const std::size_t mid = (frames.size() - 1) / 2;  // lower median
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < frames.size(); ++k) column[k] = frames[k].data[i];
        std::nth_element(column.begin(), column.begin() + mid, column.end());
        bg.data[i] = column[mid];
    }
    return bg;
}

ProbabilityMap dynamic_similarity(const BackgroundModel& bg, const Frame& f) {
    require_same_shape(bg, f, "dynamic_similarity");
    ProbabilityMap m(MapKind::Mdyn, f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double best = 0.0;
            for (int c = 0; c < f.channels; ++c) {
                best = std::max(best, std::abs(static_cast<double>(bg.at(x, y, c)) - f.at(x, y, c)));
            }
            m.at(x, y) = best;
        }
    }
    return m;
}

namespace {

struct EmState {
    std::vector<GmmComponent> comps;
};

std::vector<std::array<double, 3>> kmeans_init(
    const std::vector<std::array<double, 3>>& pts, int k, Rng& rng) {
    // k-means++ seeding
    std::vector<std::array<double, 3>> centers;
    centers.push_back(pts[rng.below(pts.size())]);
    std::vector<double> d2(pts.size(), std::numeric_limits<double>::max());
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& c = centers.back();
            double d = 0.0;
            for (int ch = 0; ch < 3; ++ch) {
                const double diff = pts[i][ch] - c[ch];
                d += diff * diff;
            }
            d2[i] = std::min(d2[i], d);
            total += d2[i];
        }
        if (total <= 0.0) {
            centers.push_back(pts[rng.below(pts.size())]);
            continue;
        }
        double pick = rng.uniform() * total;
        std::size_t chosen = pts.size() - 1;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            pick -= d2[i];
            if (pick <= 0.0) {
                chosen = i;
                break;
            }
        }
        centers.push_back(pts[chosen]);
    }
    // a few Lloyd iterations to settle the seeds
    std::vector<int> assign(pts.size(), 0);
    for (int iter = 0; iter < 10; ++iter) {
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double best = std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                double d = 0.0;
                for (int ch = 0; ch < 3; ++ch) {
                    const double diff = pts[i][ch] - centers[c][ch];
                    d += diff * diff;
                }
                if (d < best) {
                    best = d;
                    assign[i] = c;
                }
            }
        }
        std::vector<std::array<double, 3>> sums(k, {0, 0, 0});
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            for (int ch = 0; ch < 3; ++ch) sums[assign[i]][ch] += pts[i][ch];
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                for (int ch = 0; ch < 3; ++ch) centers[c][ch] = sums[c][ch] / counts[c];
            }
        }
    }
    return centers;
}

}  // namespace

GmmFit fit_gmm(const std::vector<std::array<double, 3>>& pixels, int k,
               std::uint64_t seed, ColorRole role) {
    if (k < 1) throw ConfigInvalid("fit_gmm: k must be >= 1");
    if (pixels.size() < static_cast<std::size_t>(10 * k))
        throw InsufficientSamples("fit_gmm needs >= 10*K samples");
    Rng rng(seed);
    const std::size_t n = pixels.size();

    std::array<double, 3> global_mean{};
    for (const auto& p : pixels) {
        for (int ch = 0; ch < 3; ++ch) global_mean[ch] += p[ch];
    }
    for (int ch = 0; ch < 3; ++ch) global_mean[ch] /= n;
    std::array<double, 3> global_var{};
    for (const auto& p : pixels) {
        for (int ch = 0; ch < 3; ++ch) {
            const double d = p[ch] - global_mean[ch];
            global_var[ch] += d * d;
        }
    }
    for (int ch = 0; ch < 3; ++ch) global_var[ch] = std::max(global_var[ch] / n, kVarFloor);

    ColorModel model;
    model.role = role;
    model.components.resize(k);
    const auto centers = kmeans_init(pixels, k, rng);
    for (int c = 0; c < k; ++c) {
        model.components[c].weight = 1.0 / k;
        model.components[c].mean = centers[c];
        model.components[c].var = global_var;
    }

    std::vector<double> resp(n * k);
    std::vector<double> ll_trace;
    bool reseeded = false;
    double prev_ll = -std::numeric_limits<double>::max();
    for (int iter = 0; iter < 200; ++iter) {
        // E-step in log space
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double lmax = -std::numeric_limits<double>::max();
            for (int c = 0; c < k; ++c) {
                const auto& comp = model.components[c];
                double maha = 0.0;
                double logdet = 0.0;
                for (int ch = 0; ch < 3; ++ch) {
                    const double diff = pixels[i][ch] - comp.mean[ch];
                    maha += diff * diff / comp.var[ch];
                    logdet += std::log(comp.var[ch]);
                }
                const double lp = std::log(std::max(comp.weight, 1e-300)) -
                                  0.5 * (maha + logdet + 3.0 * std::log(2.0 * M_PI));
                resp[i * k + c] = lp;
                lmax = std::max(lmax, lp);
            }
            double sum = 0.0;
            for (int c = 0; c < k; ++c) sum += std::exp(resp[i * k + c] - lmax);
            const double lse = lmax + std::log(sum);
            ll += lse;
            for (int c = 0; c < k; ++c) resp[i * k + c] = std::exp(resp[i * k + c] - lse);
        }
        ll_trace.push_back(ll);

        // M-step
        bool degenerate = false;
        for (int c = 0; c < k; ++c) {
            double nk = 0.0;
            for (std::size_t i = 0; i < n; ++i) nk += resp[i * k + c];
            auto& comp = model.components[c];
            if (nk / n < 1e-8) {
                if (reseeded) throw DegenerateComponent("component weight collapsed twice");
                // re-seed the collapsed component at a random sample once
                comp.mean = pixels[rng.below(n)];
                comp.var = global_var;
                comp.weight = 1.0 / k;
                reseeded = true;
                degenerate = true;
                continue;
            }
            comp.weight = nk / n;
            std::array<double, 3> mean{};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + c];
                for (int ch = 0; ch < 3; ++ch) mean[ch] += r * pixels[i][ch];
            }
            for (int ch = 0; ch < 3; ++ch) mean[ch] /= nk;
            std::array<double, 3> var{};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + c];
                for (int ch = 0; ch < 3; ++ch) {
                    const double d = pixels[i][ch] - mean[ch];
                    var[ch] += r * d * d;
                }
            }
            comp.mean = mean;
            for (int ch = 0; ch < 3; ++ch) comp.var[ch] = std::max(var[ch] / nk, kVarFloor);
        }
        if (degenerate) {
            // renormalize weights after the re-seed
            double wsum = 0.0;
            for (const auto& comp : model.components) wsum += comp.weight;
            for (auto& comp : model.components) comp.weight /= wsum;
            prev_ll = -std::numeric_limits<double>::max();
            continue;
        }
        if (iter > 0 && std::abs(ll - prev_ll) < 1e-6) break;
        prev_ll = ll;
    }
    return {model, ll_trace};
}

ProbabilityMap gmm_likelihood(const ColorModel& model, const Frame& f) {
    if (f.channels != 3) throw DimensionMismatch("gmm_likelihood expects RGB frames");
    const double d0 = model.reference_density();
    ProbabilityMap out(model.role == ColorRole::Foreground ? MapKind::Pfg : MapKind::Pbg,
                       f.width, f.height);
    const int k = static_cast<int>(model.components.size());
    std::vector<double> peak(k), w(k);
    std::vector<std::array<double, 3>> mean(k), inv_var(k);
    for (int c = 0; c < k; ++c) {
        const auto& comp = model.components[c];
        peak[c] = component_peak(comp);
        w[c] = comp.weight;
        mean[c] = comp.mean;
        for (int ch = 0; ch < 3; ++ch) inv_var[c][ch] = 1.0 / comp.var[ch];
    }
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double d = 0.0;
            for (int c = 0; c < k; ++c) {
                double maha = 0.0;
                for (int ch = 0; ch < 3; ++ch) {
                    const double diff = f.at(x, y, ch) - mean[c][ch];
                    maha += diff * diff * inv_var[c][ch];
                }
                d += w[c] * peak[c] * std::exp(-0.5 * maha);
            }
            out.at(x, y) = d / (d + d0);
        }
    }
    return out;
}

ProbabilityMap player_probability(const ProbabilityMap& p_fg,
                                  const ProbabilityMap& p_bg,
                                  const ProbabilityMap& m_dyn) {
    if (p_fg.width != p_bg.width || p_fg.height != p_bg.height ||
        p_fg.width != m_dyn.width || p_fg.height != m_dyn.height)
        throw DimensionMismatch("player_probability");
    ProbabilityMap out(MapKind::Pplayer, p_fg.width, p_fg.height);
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const double denom = p_fg.v[i] + p_bg.v[i];
        if (denom < 1e-12) {
            out.v[i] = 0.0;
        } else {
            out.v[i] = std::clamp(p_fg.v[i] * m_dyn.v[i] / denom, 0.0, 1.0);
        }
    }
    return out;
}

std::vector<PlayerDetection> localize_players(const ProbabilityMap& p,
                                              const geometry::Homography& h,
                                              const geometry::CourtModel& court,
                                              double threshold, double min_mass) {
    if (p.kind != MapKind::Pplayer)
        throw ConfigInvalid("localize_players expects a P_player map");
    const int w = p.width, ht = p.height;
    std::vector<int> label(static_cast<std::size_t>(w) * ht, -1);
    std::vector<PlayerDetection> detections;
    std::deque<std::pair<int, int>> queue;
    int next_label = 0;
    for (int y = 0; y < ht; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (label[idx] >= 0 || p.v[idx] <= threshold) continue;
            // flood-fill one 8-connected component
            int x0 = x, x1 = x, y0 = y, y1 = y;
            double mass = 0.0;
            label[idx] = next_label;
            queue.push_back({x, y});
            while (!queue.empty()) {
                const auto [cx, cy] = queue.front();
                queue.pop_front();
                mass += p.at(cx, cy);
                x0 = std::min(x0, cx);
                x1 = std::max(x1, cx);
                y0 = std::min(y0, cy);
                y1 = std::max(y1, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx, ny = cy + dy;
                        if (nx < 0 || ny < 0 || nx >= w || ny >= ht) continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
                        if (label[nidx] >= 0 || p.v[nidx] <= threshold) continue;
                        label[nidx] = next_label;
                        queue.push_back({nx, ny});
                    }
                }
            }
            ++next_label;
            if (mass < min_mass) continue;
            const geometry::Vec2 feet{(x0 + x1) / 2.0, static_cast<double>(y1)};
            geometry::Vec2 court_pos;
            try {
                court_pos = geometry::project(h, feet);
            } catch (const PointAtHorizon&) {
                continue;
            }
            if (!court.in_domain(court_pos)) continue;
            detections.push_back(
                {court_pos, {x0, y0, x1 - x0 + 1, y1 - y0 + 1}, mass});
        }
    }
    std::stable_sort(detections.begin(), detections.end(),
                     [](const PlayerDetection& a, const PlayerDetection& b) {
                         return a.mass > b.mass;
                     });
    return detections;
}

std::string color_model_to_json(const ColorModel& m) {
    nlohmann::json j;
    j["role"] = m.role == ColorRole::Foreground ? "foreground" : "background";
    j["provenance"] = m.provenance;
    for (const auto& c : m.components) {
        j["components"].push_back({{"weight", c.weight},
                                   {"mean", c.mean},
                                   {"var", c.var}});
    }
    return j.dump(2);
}

ColorModel color_model_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    ColorModel m;
    m.role = j.at("role") == "foreground" ? ColorRole::Foreground : ColorRole::Background;
    m.provenance = j.value("provenance", "");
    for (const auto& jc : j.at("components")) {
        GmmComponent c;
        c.weight = jc.at("weight");
        c.mean = jc.at("mean");
        c.var = jc.at("var");
        m.components.push_back(c);
    }
    return m;
}

}  // namespace vball::segmentation
