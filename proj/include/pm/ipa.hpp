#pragma once

#include "pm/event.hpp"
#include "pm/kinematics.hpp"
#include "pm/sensing.hpp"

#include <span>

namespace pm {

/// IPA state over the stacked parameter vector Theta = [Theta_1; ...; Theta_N].
struct GradientState {
    /// Row i holds dR_i/dTheta.
    Eigen::MatrixXd dR;
    Eigen::VectorXd dJ1;
    Eigen::VectorXd dJ2;
    Eigen::VectorXd dJ3;

    static GradientState zero(Eigen::Index targets, Eigen::Index params);
};

/// dP_i/dTheta by the chain rule through every agent's position and velocity.
/// `offsets[n]` is the first column of agent n's block.
void detection_gradient(std::span<const DetectionPartials> partials, std::span<const KinematicSample> samples,
                        std::span<const Eigen::Index> offsets, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out);

/// One Euler step of d/dt dR_i = -B dP_i for every target that is not pinned
/// at zero; pinned rows are held at zero. `detection_grads` row i is dP_i/dTheta.
void propagate_dR(GradientState& grad, const Eigen::Ref<const Eigen::MatrixXd>& detection_grads,
                  const std::vector<bool>& pinned, double decay, double dt);

/// Jump conditions: xi^0 resets the target's row to zero; xi^+ and every other
/// kind leave the state untouched.
void apply_event(GradientState& grad, const Event& event);

/// Left-rectangle accumulation of dJ1 = sum_i sigma_i dR_i and the penalty
/// gradients over one step.
void accumulate(GradientState& grad, const Eigen::Ref<const Eigen::VectorXd>& weights,
                const Eigen::Ref<const Eigen::VectorXd>& agent_penalty_grad,
                const Eigen::Ref<const Eigen::VectorXd>& obstacle_penalty_grad, double dt);

/// (dJ1 + M2 dJ2 + M3 dJ3) / T.
Eigen::VectorXd assemble(const GradientState& grad, double horizon, double agent_penalty, double obstacle_penalty);

}  // namespace pm
