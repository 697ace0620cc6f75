#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "grid_field.hpp"
#include "measurement.hpp"

namespace quansim {

// Squared-exponential kernel GP with fixed hyperparameters (no marginal
// likelihood optimization). The prior mean defaults to 0.5, the midpoint of a
// normalized field.
struct GpHyperparams {
    double length_scale_cells = 3.0;
    // Prior variance sized for fields normalized to [0,1] (value spread well
    // under 1); also keeps the objective's variance term on the same scale as
    // its quantile-standard-error term.
    double signal_variance = 0.1;
    double noise_variance = 0.05 * 0.05;  // matches the default sensor noise
    double jitter = 1e-8;
    double prior_mean = 0.5;

    void validate() const;  // throws InvalidArgumentError

    double kernel(Cell a, Cell b) const {
        const double dx = static_cast<double>(a.x - b.x);
        const double dy = static_cast<double>(a.y - b.y);
        const double d2 = dx * dx + dy * dy;
        return signal_variance * std::exp(-d2 / (2.0 * length_scale_cells * length_scale_cells));
    }
};

// Result of evaluating a hypothetical extension without materializing the
// extended posterior. `kept` indexes the extra entries that survived
// provenance dedup; `kept_base_variance[i]` is the pre-update posterior
// variance at the location of extra entry kept[i].
struct ExtensionEval {
    Eigen::VectorXd mean_grid;
    std::vector<std::size_t> kept;
    std::vector<double> kept_base_variance;
};

// Exact GP posterior over all grid cells, conditioned on a measurement set
// deduplicated by (provenance token, location). Immutable; copies share state.
//
// extended() is algebraically a refit of the union: the Cholesky factor is
// grown by a block update, which is the same factorization computed
// incrementally. Unit tests pin its agreement with a from-scratch refit.
class GpPosterior {
public:
    struct Impl;  // opaque; public so factory helpers can name it

    GpPosterior() = default;  // empty prior over an unset grid; fit before use

    // Empty data yields the prior: mean prior_mean and variance
    // signal_variance everywhere. Throws NumericError if the Gram matrix is
    // not positive definite after escalating jitter x10 up to 3 times.
    static GpPosterior fit(const MeasurementSet& data, const GpHyperparams& hp,
                           const GridGeometry& grid);

    // Posterior equal to fit(training U extra); *this is unchanged. Entries
    // already present (by token+location) are dropped; if nothing remains the
    // returned posterior shares this one's state bit-for-bit.
    GpPosterior extended(const MeasurementSet& extra) const;

    // Mean of the hypothetical extension plus pre-update variances at the new
    // locations, skipping the full posterior construction.
    ExtensionEval evaluate_extension(const MeasurementSet& extra) const;

    // Posterior mean over all grid cells (cached).
    const Eigen::VectorXd& mean_grid() const;

    // Posterior (latent) variance over all grid cells. Values in [-1e-9, 0)
    // clamp to 0; anything below -1e-9 raises NumericError.
    Eigen::VectorXd variance_grid() const;

    // Variance at a subset of cells.
    std::vector<double> variances_at(const std::vector<Cell>& cells) const;

    bool fitted() const { return impl_ != nullptr; }
    std::size_t training_size() const;
    const MeasurementSet& training_data() const;
    const GpHyperparams& hyperparams() const;
    const GridGeometry& grid() const;
    double jitter_used() const;

private:
    explicit GpPosterior(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

// Spec-facing aliases for the prediction surface.
inline const Eigen::VectorXd& predict_mean(const GpPosterior& gp) { return gp.mean_grid(); }
inline Eigen::VectorXd predict_var(const GpPosterior& gp) { return gp.variance_grid(); }

}  // namespace quansim
