#include "gp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "errors.hpp"

namespace quansim {

namespace {

constexpr double kNegativeVarianceTolerance = 1e-9;

double clamp_variance(double v) {
    if (v >= 0.0) return v;
    if (v >= -kNegativeVarianceTolerance) return 0.0;
    throw NumericError("negative posterior variance " + std::to_string(v));
}

}  // namespace

void GpHyperparams::validate() const {
    if (!(length_scale_cells > 0.0)) throw InvalidArgumentError("length_scale_cells must be > 0");
    if (!(signal_variance > 0.0)) throw InvalidArgumentError("signal_variance must be > 0");
    if (noise_variance < 0.0) throw InvalidArgumentError("noise_variance must be >= 0");
    if (!(jitter > 0.0)) throw InvalidArgumentError("jitter must be > 0");
    if (!std::isfinite(prior_mean)) throw InvalidArgumentError("prior_mean must be finite");
}

struct GpPosterior::Impl {
    GpHyperparams hp;
    GridGeometry grid;
    MeasurementSet train;     // deduplicated
    Eigen::MatrixXd L;        // lower Cholesky of K + (noise + jitter) I
    Eigen::VectorXd alpha;    // (K + (noise + jitter) I)^{-1} (y - prior)
    Eigen::MatrixXd kstar;    // cells x n cross-kernel, cached for mean updates
    Eigen::VectorXd mean;     // prior + kstar * alpha
    double jitter_used = 0.0;
};

namespace {

Eigen::MatrixXd cross_kernel_all_cells(const GpHyperparams& hp, const GridGeometry& grid,
                                       const std::vector<Cell>& train_locs) {
    const int cells = grid.cell_count();
    Eigen::MatrixXd kstar(cells, static_cast<Eigen::Index>(train_locs.size()));
    for (Eigen::Index j = 0; j < kstar.cols(); ++j) {
        const Cell t = train_locs[static_cast<std::size_t>(j)];
        for (int ci = 0; ci < cells; ++ci) {
            kstar(ci, j) = hp.kernel(grid.cell_at(ci), t);
        }
    }
    return kstar;
}

Eigen::VectorXd centered_values(const MeasurementSet& data, double prior_mean) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i) y[static_cast<Eigen::Index>(i)] =
        data.values()[i] - prior_mean;
    return y;
}

// Cholesky with jitter escalation: the initial jitter plus up to 3 retries at
// x10 each. Reports condition diagnostics on failure.
std::pair<Eigen::MatrixXd, double> robust_cholesky(Eigen::MatrixXd gram, double noise,
                                                   double initial_jitter, std::size_t n) {
    double jitter = initial_jitter;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::MatrixXd k = gram;
        k.diagonal().array() += noise + jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(k);
        if (llt.info() == Eigen::Success) {
            return {Eigen::MatrixXd(llt.matrixL()), jitter};
        }
        jitter *= 10.0;
    }
    std::ostringstream msg;
    msg << "Gram matrix not positive definite after jitter escalation to " << jitter
        << " (n=" << n << ", diag range [" << gram.diagonal().minCoeff() + noise << ", "
        << gram.diagonal().maxCoeff() + noise << "])";
    throw NumericError(msg.str());
}

std::shared_ptr<const GpPosterior::Impl> make_impl(MeasurementSet dedup, const GpHyperparams& hp,
                                                   const GridGeometry& grid,
                                                   double initial_jitter);

}  // namespace

GpPosterior GpPosterior::fit(const MeasurementSet& data, const GpHyperparams& hp,
                             const GridGeometry& grid) {
    hp.validate();
    if (grid.cell_count() < 1) throw ShapeError("GP grid must contain at least one cell");
    for (Cell c : data.locations()) {
        if (!grid.contains(c)) {
            throw BoundsError("training location (" + std::to_string(c.x) + "," +
                              std::to_string(c.y) + ") outside grid");
        }
    }
    return GpPosterior(make_impl(data.deduplicated(), hp, grid, hp.jitter));
}

namespace {

std::shared_ptr<const GpPosterior::Impl> make_impl(MeasurementSet dedup, const GpHyperparams& hp,
                                                   const GridGeometry& grid,
                                                   double initial_jitter) {
    auto impl = std::make_shared<GpPosterior::Impl>();
    impl->hp = hp;
    impl->grid = grid;
    impl->train = std::move(dedup);
    const std::size_t n = impl->train.size();
    if (n == 0) {
        impl->mean = Eigen::VectorXd::Constant(grid.cell_count(), hp.prior_mean);
        impl->kstar.resize(grid.cell_count(), 0);
        impl->jitter_used = initial_jitter;
        return impl;
    }
    const auto& locs = impl->train.locations();
    Eigen::MatrixXd gram(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double k = hp.kernel(locs[i], locs[j]);
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
            gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
        }
    }
    // The kernel diagonal is exactly signal_variance; exclude it from the
    // added noise term.
    gram.diagonal().setConstant(hp.signal_variance);
    auto [lower, jitter] = robust_cholesky(std::move(gram), hp.noise_variance, initial_jitter, n);
    impl->L = std::move(lower);
    impl->jitter_used = jitter;

    const Eigen::VectorXd y = centered_values(impl->train, hp.prior_mean);
    Eigen::VectorXd z = impl->L.triangularView<Eigen::Lower>().solve(y);
    impl->alpha = impl->L.triangularView<Eigen::Lower>().adjoint().solve(z);
    impl->kstar = cross_kernel_all_cells(hp, grid, locs);
    impl->mean = impl->kstar * impl->alpha;
    impl->mean.array() += hp.prior_mean;
    return impl;
}

// Indices of `extra` entries that are new with respect to `base` and unique
// within `extra` itself.
std::vector<std::size_t> surviving_entries(const MeasurementSet& base,
                                           const MeasurementSet& extra) {
    std::vector<std::size_t> kept;
    std::unordered_set<std::uint64_t> seen;
    for (std::size_t i = 0; i < extra.size(); ++i) {
        const auto key = measurement_key(extra.tokens()[i], extra.locations()[i]);
        if (base.contains(extra.tokens()[i], extra.locations()[i])) continue;
        if (!seen.insert(key).second) continue;
        kept.push_back(i);
    }
    return kept;
}

}  // namespace

GpPosterior GpPosterior::extended(const MeasurementSet& extra) const {
    if (!impl_) throw InvalidArgumentError("extended() on an unfit posterior");
    const Impl& base = *impl_;
    for (Cell c : extra.locations()) {
        if (!base.grid.contains(c)) {
            throw BoundsError("extension location (" + std::to_string(c.x) + "," +
                              std::to_string(c.y) + ") outside grid");
        }
    }
    const auto kept = surviving_entries(base.train, extra);
    if (kept.empty()) return GpPosterior(impl_);

    MeasurementSet merged = base.train;
    for (std::size_t i : kept) {
        merged.add(extra.locations()[i], extra.values()[i], extra.tokens()[i]);
    }

    const std::size_t n = base.train.size();
    const std::size_t m = kept.size();
    if (n == 0) {
        return GpPosterior(make_impl(std::move(merged), base.hp, base.grid, base.jitter_used));
    }

    const auto& hp = base.hp;
    Eigen::MatrixXd b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    Eigen::MatrixXd c(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
        const Cell cj = extra.locations()[kept[j]];
        for (std::size_t i = 0; i < n; ++i) {
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                hp.kernel(base.train.locations()[i], cj);
        }
        for (std::size_t i = 0; i <= j; ++i) {
            const double k = hp.kernel(extra.locations()[kept[i]], cj);
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
            c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
        }
        c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
            hp.signal_variance + hp.noise_variance + base.jitter_used;
    }

    const Eigen::MatrixXd v = base.L.triangularView<Eigen::Lower>().solve(b);
    Eigen::MatrixXd schur = c - v.transpose() * v;
    Eigen::LLT<Eigen::MatrixXd> schur_llt(schur);
    if (schur_llt.info() != Eigen::Success) {
        // Degenerate block; refit the union from scratch so jitter escalation
        // applies to the whole system.
        return GpPosterior(make_impl(std::move(merged), hp, base.grid, base.jitter_used * 10.0));
    }

    auto impl = std::make_shared<Impl>();
    impl->hp = hp;
    impl->grid = base.grid;
    impl->train = std::move(merged);
    impl->jitter_used = base.jitter_used;

    const auto ni = static_cast<Eigen::Index>(n);
    const auto mi = static_cast<Eigen::Index>(m);
    impl->L = Eigen::MatrixXd::Zero(ni + mi, ni + mi);
    impl->L.topLeftCorner(ni, ni) = base.L;
    impl->L.bottomLeftCorner(mi, ni) = v.transpose();
    impl->L.bottomRightCorner(mi, mi) = schur_llt.matrixL();

    const Eigen::VectorXd y = centered_values(impl->train, hp.prior_mean);
    Eigen::VectorXd z = impl->L.triangularView<Eigen::Lower>().solve(y);
    impl->alpha = impl->L.triangularView<Eigen::Lower>().adjoint().solve(z);

    impl->kstar.resize(base.grid.cell_count(), ni + mi);
    impl->kstar.leftCols(ni) = base.kstar;
    for (Eigen::Index j = 0; j < mi; ++j) {
        const Cell cj = impl->train.locations()[n + static_cast<std::size_t>(j)];
        for (int ci = 0; ci < base.grid.cell_count(); ++ci) {
            impl->kstar(ci, ni + j) = hp.kernel(base.grid.cell_at(ci), cj);
        }
    }
    impl->mean = impl->kstar * impl->alpha;
    impl->mean.array() += hp.prior_mean;
    return GpPosterior(impl);
}

ExtensionEval GpPosterior::evaluate_extension(const MeasurementSet& extra) const {
    if (!impl_) throw InvalidArgumentError("evaluate_extension() on an unfit posterior");
    const Impl& base = *impl_;
    ExtensionEval eval;
    eval.kept = surviving_entries(base.train, extra);
    if (eval.kept.empty()) {
        eval.mean_grid = base.mean;
        return eval;
    }

    const std::size_t n = base.train.size();
    const std::size_t m = eval.kept.size();
    const auto& hp = base.hp;
    const auto mi = static_cast<Eigen::Index>(m);

    Eigen::MatrixXd knew_cells(base.grid.cell_count(), mi);
    for (Eigen::Index j = 0; j < mi; ++j) {
        const Cell cj = extra.locations()[eval.kept[static_cast<std::size_t>(j)]];
        if (!base.grid.contains(cj)) {
            throw BoundsError("extension location (" + std::to_string(cj.x) + "," +
                              std::to_string(cj.y) + ") outside grid");
        }
        for (int ci = 0; ci < base.grid.cell_count(); ++ci) {
            knew_cells(ci, j) = hp.kernel(base.grid.cell_at(ci), cj);
        }
    }

    Eigen::VectorXd y2(mi);
    for (Eigen::Index j = 0; j < mi; ++j) {
        y2[j] = extra.values()[eval.kept[static_cast<std::size_t>(j)]] - hp.prior_mean;
    }

    Eigen::MatrixXd c(mi, mi);
    for (std::size_t j = 0; j < m; ++j) {
        const Cell cj = extra.locations()[eval.kept[j]];
        for (std::size_t i = 0; i <= j; ++i) {
            const double k = hp.kernel(extra.locations()[eval.kept[i]], cj);
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = k;
            c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = k;
        }
        c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) =
            hp.signal_variance + hp.noise_variance + base.jitter_used;
    }

    if (n == 0) {
        Eigen::LLT<Eigen::MatrixXd> llt(c);
        if (llt.info() != Eigen::Success) {
            // Fall back to the robust full-fit path.
            MeasurementSet subset;
            for (std::size_t i : eval.kept) {
                subset.add(extra.locations()[i], extra.values()[i], extra.tokens()[i]);
            }
            const GpPosterior full = extended(subset);
            eval.mean_grid = full.mean_grid();
            eval.kept_base_variance.assign(m, hp.signal_variance);
            return eval;
        }
        const Eigen::VectorXd a2 = llt.solve(y2);
        eval.mean_grid = knew_cells * a2;
        eval.mean_grid.array() += hp.prior_mean;
        eval.kept_base_variance.assign(m, hp.signal_variance);
        return eval;
    }

    Eigen::MatrixXd b(static_cast<Eigen::Index>(n), mi);
    for (std::size_t j = 0; j < m; ++j) {
        const Cell cj = extra.locations()[eval.kept[j]];
        for (std::size_t i = 0; i < n; ++i) {
            b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                hp.kernel(base.train.locations()[i], cj);
        }
    }

    const Eigen::MatrixXd v = base.L.triangularView<Eigen::Lower>().solve(b);
    Eigen::MatrixXd schur = c - v.transpose() * v;

    eval.kept_base_variance.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const auto ji = static_cast<Eigen::Index>(j);
        eval.kept_base_variance[j] =
            clamp_variance(schur(ji, ji) - hp.noise_variance - base.jitter_used);
    }

    Eigen::LLT<Eigen::MatrixXd> schur_llt(schur);
    if (schur_llt.info() != Eigen::Success) {
        MeasurementSet subset;
        for (std::size_t i : eval.kept) {
            subset.add(extra.locations()[i], extra.values()[i], extra.tokens()[i]);
        }
        const GpPosterior full = extended(subset);
        eval.mean_grid = full.mean_grid();
        return eval;
    }

    const Eigen::VectorXd r2 = y2 - b.transpose() * base.alpha;
    const Eigen::VectorXd a2 = schur_llt.solve(r2);
    const Eigen::VectorXd w = v * a2;
    const Eigen::VectorXd u = base.L.triangularView<Eigen::Lower>().adjoint().solve(w);
    eval.mean_grid = base.mean + knew_cells * a2 - base.kstar * u;
    return eval;
}

const Eigen::VectorXd& GpPosterior::mean_grid() const {
    if (!impl_) throw InvalidArgumentError("mean_grid() on an unfit posterior");
    return impl_->mean;
}

Eigen::VectorXd GpPosterior::variance_grid() const {
    if (!impl_) throw InvalidArgumentError("variance_grid() on an unfit posterior");
    const Impl& base = *impl_;
    const int cells = base.grid.cell_count();
    if (base.train.empty()) {
        return Eigen::VectorXd::Constant(cells, base.hp.signal_variance);
    }
    const Eigen::MatrixXd w =
        base.L.triangularView<Eigen::Lower>().solve(base.kstar.transpose());
    Eigen::VectorXd var(cells);
    for (int ci = 0; ci < cells; ++ci) {
        var[ci] = clamp_variance(base.hp.signal_variance - w.col(ci).squaredNorm());
    }
    return var;
}

std::vector<double> GpPosterior::variances_at(const std::vector<Cell>& cells) const {
    if (!impl_) throw InvalidArgumentError("variances_at() on an unfit posterior");
    const Impl& base = *impl_;
    if (base.train.empty()) {
        return std::vector<double>(cells.size(), base.hp.signal_variance);
    }
    const std::size_t n = base.train.size();
    Eigen::MatrixXd kc(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cells.size()));
    for (std::size_t j = 0; j < cells.size(); ++j) {
        if (!base.grid.contains(cells[j])) {
            throw BoundsError("variance query outside grid");
        }
        for (std::size_t i = 0; i < n; ++i) {
            kc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                base.hp.kernel(base.train.locations()[i], cells[j]);
        }
    }
    const Eigen::MatrixXd w = base.L.triangularView<Eigen::Lower>().solve(kc);
    std::vector<double> var(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) {
        var[j] = clamp_variance(base.hp.signal_variance -
                                w.col(static_cast<Eigen::Index>(j)).squaredNorm());
    }
    return var;
}

std::size_t GpPosterior::training_size() const { return impl_ ? impl_->train.size() : 0; }

const MeasurementSet& GpPosterior::training_data() const {
    if (!impl_) throw InvalidArgumentError("training_data() on an unfit posterior");
    return impl_->train;
}

const GpHyperparams& GpPosterior::hyperparams() const {
    if (!impl_) throw InvalidArgumentError("hyperparams() on an unfit posterior");
    return impl_->hp;
}

const GridGeometry& GpPosterior::grid() const {
    if (!impl_) throw InvalidArgumentError("grid() on an unfit posterior");
    return impl_->grid;
}

double GpPosterior::jitter_used() const {
    if (!impl_) throw InvalidArgumentError("jitter_used() on an unfit posterior");
    return impl_->jitter_used;
}

}  // namespace quansim
