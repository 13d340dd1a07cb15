#include "pm/ipa.hpp"

#include <cassert>

namespace pm {

GradientState GradientState::zero(Eigen::Index targets, Eigen::Index params) {
    return {Eigen::MatrixXd::Zero(targets, params), Eigen::VectorXd::Zero(params), Eigen::VectorXd::Zero(params),
            Eigen::VectorXd::Zero(params)};
}

void detection_gradient(std::span<const DetectionPartials> partials, std::span<const KinematicSample> samples,
                        std::span<const Eigen::Index> offsets, Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> out) {
    assert(partials.size() == samples.size() && samples.size() == offsets.size());
    out.setZero();
    for (std::size_t n = 0; n < partials.size(); ++n) {
        const auto& dp = partials[n];
        if (dp.d_pos.isZero(0.0) && dp.d_vel.isZero(0.0)) continue;
        const auto& s = samples[n];
        out.segment(offsets[n], s.pos_partials.cols()).noalias() +=
            dp.d_pos.transpose() * s.pos_partials + dp.d_vel.transpose() * s.vel_partials;
    }
}

void propagate_dR(GradientState& grad, const Eigen::Ref<const Eigen::MatrixXd>& detection_grads,
                  const std::vector<bool>& pinned, double decay, double dt) {
    for (Eigen::Index i = 0; i < grad.dR.rows(); ++i) {
        if (pinned[i]) {
            grad.dR.row(i).setZero();
        } else {
            grad.dR.row(i).noalias() -= (decay * dt) * detection_grads.row(i);
        }
    }
}

void apply_event(GradientState& grad, const Event& event) {
    if (event.kind == EventKind::UncertaintyHitsZero) grad.dR.row(event.indices[0]).setZero();
}

void accumulate(GradientState& grad, const Eigen::Ref<const Eigen::VectorXd>& weights,
                const Eigen::Ref<const Eigen::VectorXd>& agent_penalty_grad,
                const Eigen::Ref<const Eigen::VectorXd>& obstacle_penalty_grad, double dt) {
    grad.dJ1.noalias() += dt * (grad.dR.transpose() * weights);
    grad.dJ2.noalias() += dt * agent_penalty_grad;
    grad.dJ3.noalias() += dt * obstacle_penalty_grad;
}

Eigen::VectorXd assemble(const GradientState& grad, double horizon, double agent_penalty, double obstacle_penalty) {
    return (grad.dJ1 + agent_penalty * grad.dJ2 + obstacle_penalty * grad.dJ3) / horizon;
}

}  // namespace pm
