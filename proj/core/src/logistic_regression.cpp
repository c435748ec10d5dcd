#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "chirpsense/ml.hpp"

namespace chirpsense::ml {

namespace {

constexpr std::size_t kParams = kNumClasses * (kNumFeatures + 1);

inline double dot_row(const std::vector<double>& theta, std::size_t k,
                      const FeatureVector& x) {
    const std::size_t base = k * (kNumFeatures + 1);
    double z = theta[base + kNumFeatures];  // bias
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        z += theta[base + j] * x[j];
    }
    return z;
}

// log-sum-exp with the max factored out.
void softmax(std::array<double, kNumClasses>& z) {
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
    }
    for (double& v : z) {
        v /= sum;
    }
}

double norm2(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) {
        acc += x * x;
    }
    return std::sqrt(acc);
}

}  // namespace

namespace detail {

double logreg_loss(const std::vector<double>& theta,
                   const std::vector<FeatureVector>& x, const std::vector<int>& y,
                   double l2) {
    const double n = static_cast<double>(x.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::array<double, kNumClasses> z;
        double zmax = -INFINITY;
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            z[k] = dot_row(theta, k, x[i]);
            zmax = std::max(zmax, z[k]);
        }
        double lse = 0.0;
        for (double v : z) {
            lse += std::exp(v - zmax);
        }
        loss += zmax + std::log(lse) - z[static_cast<std::size_t>(y[i])];
    }
    loss /= n;
    double penalty = 0.0;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        for (std::size_t j = 0; j < kNumFeatures; ++j) {  // biases exempt
            const double w = theta[k * (kNumFeatures + 1) + j];
            penalty += w * w;
        }
    }
    return loss + 0.5 * l2 * penalty / n;
}

std::vector<double> logreg_gradient(const std::vector<double>& theta,
                                    const std::vector<FeatureVector>& x,
                                    const std::vector<int>& y, double l2) {
    const double n = static_cast<double>(x.size());
    std::vector<double> grad(kParams, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::array<double, kNumClasses> p;
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            p[k] = dot_row(theta, k, x[i]);
        }
        softmax(p);
        for (std::size_t k = 0; k < kNumClasses; ++k) {
            const double err = p[k] - (y[i] == static_cast<int>(k) ? 1.0 : 0.0);
            const std::size_t base = k * (kNumFeatures + 1);
            for (std::size_t j = 0; j < kNumFeatures; ++j) {
                grad[base + j] += err * x[i][j];
            }
            grad[base + kNumFeatures] += err;
        }
    }
    for (double& g : grad) {
        g /= n;
    }
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            grad[k * (kNumFeatures + 1) + j] += l2 * theta[k * (kNumFeatures + 1) + j] / n;
        }
    }
    return grad;
}

}  // namespace detail

void LogisticRegression::fit(const Dataset& data, const Config& cfg) {
    data.validate();
    if (data.size() == 0) {
        throw std::invalid_argument("empty training set");
    }
    cfg_ = cfg;

    // Standardize with training statistics; constant features get scale 1.
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        double mean = 0.0;
        for (const auto& xi : data.x) {
            mean += xi[j];
        }
        mean /= static_cast<double>(data.size());
        double var = 0.0;
        for (const auto& xi : data.x) {
            var += (xi[j] - mean) * (xi[j] - mean);
        }
        var /= static_cast<double>(data.size());
        mean_[j] = mean;
        scale_[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    std::vector<FeatureVector> xs(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < kNumFeatures; ++j) {
            xs[i][j] = (data.x[i][j] - mean_[j]) / scale_[j];
        }
    }

    // L-BFGS with Armijo backtracking; the objective is convex so a plain
    // descent loop with curvature pairs is enough.
    theta_.assign(kParams, 0.0);
    std::vector<double> grad = detail::logreg_gradient(theta_, xs, data.y, cfg.l2);
    double loss = detail::logreg_loss(theta_, xs, data.y, cfg.l2);

    constexpr std::size_t kHistory = 8;
    std::deque<std::vector<double>> s_hist, y_hist;
    std::deque<double> rho_hist;

    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        if (norm2(grad) <= cfg.tolerance) {
            break;
        }
        // Two-loop recursion.
        std::vector<double> dir = grad;
        std::vector<double> alpha(s_hist.size());
        for (std::size_t h = s_hist.size(); h-- > 0;) {
            double sd = 0.0;
            for (std::size_t i = 0; i < kParams; ++i) {
                sd += s_hist[h][i] * dir[i];
            }
            alpha[h] = rho_hist[h] * sd;
            for (std::size_t i = 0; i < kParams; ++i) {
                dir[i] -= alpha[h] * y_hist[h][i];
            }
        }
        if (!s_hist.empty()) {
            double sy = 0.0, yy = 0.0;
            for (std::size_t i = 0; i < kParams; ++i) {
                sy += s_hist.back()[i] * y_hist.back()[i];
                yy += y_hist.back()[i] * y_hist.back()[i];
            }
            const double gamma = sy / yy;
            for (double& d : dir) {
                d *= gamma;
            }
        }
        for (std::size_t h = 0; h < s_hist.size(); ++h) {
            double yd = 0.0;
            for (std::size_t i = 0; i < kParams; ++i) {
                yd += y_hist[h][i] * dir[i];
            }
            const double beta = rho_hist[h] * yd;
            for (std::size_t i = 0; i < kParams; ++i) {
                dir[i] += s_hist[h][i] * (alpha[h] - beta);
            }
        }
        for (double& d : dir) {
            d = -d;
        }

        double dg = 0.0;
        for (std::size_t i = 0; i < kParams; ++i) {
            dg += dir[i] * grad[i];
        }
        if (dg >= 0.0) {  // not a descent direction: reset to steepest descent
            for (std::size_t i = 0; i < kParams; ++i) {
                dir[i] = -grad[i];
            }
            dg = -norm2(grad) * norm2(grad);
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
        }

        double step = 1.0;
        std::vector<double> theta_new(kParams);
        double loss_new = loss;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t i = 0; i < kParams; ++i) {
                theta_new[i] = theta_[i] + step * dir[i];
            }
            loss_new = detail::logreg_loss(theta_new, xs, data.y, cfg.l2);
            if (loss_new <= loss + 1e-4 * step * dg) {
                break;
            }
            step *= 0.5;
        }

        std::vector<double> grad_new = detail::logreg_gradient(theta_new, xs, data.y, cfg.l2);
        std::vector<double> s(kParams), yv(kParams);
        double sy = 0.0;
        for (std::size_t i = 0; i < kParams; ++i) {
            s[i] = theta_new[i] - theta_[i];
            yv[i] = grad_new[i] - grad[i];
            sy += s[i] * yv[i];
        }
        if (sy > 1e-12) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(yv));
            rho_hist.push_back(1.0 / sy);
            if (s_hist.size() > kHistory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        theta_ = std::move(theta_new);
        grad = std::move(grad_new);
        loss = loss_new;
    }
    trained_ = true;
}

std::vector<double> LogisticRegression::probabilities(const FeatureVector& x) const {
    if (!trained_) {
        throw std::runtime_error("logistic regression is not trained");
    }
    FeatureVector xs;
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        xs[j] = (x[j] - mean_[j]) / scale_[j];
    }
    std::array<double, kNumClasses> z;
    for (std::size_t k = 0; k < kNumClasses; ++k) {
        z[k] = dot_row(theta_, k, xs);
    }
    softmax(z);
    return {z.begin(), z.end()};
}

int LogisticRegression::predict(const FeatureVector& x) const {
    const std::vector<double> p = probabilities(x);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

void LogisticRegression::restore(std::vector<double> theta,
                                 std::array<double, kNumFeatures> mean,
                                 std::array<double, kNumFeatures> scale,
                                 const Config& cfg) {
    if (theta.size() != kParams) {
        throw std::invalid_argument("bad parameter vector size");
    }
    theta_ = std::move(theta);
    mean_ = mean;
    scale_ = scale;
    cfg_ = cfg;
    trained_ = true;
}

}  // namespace chirpsense::ml
