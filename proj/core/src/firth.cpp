#include "cvaudit/stats/firth.hpp"

#include <cmath>
#include <sstream>

#include "cvaudit/stats/distributions.hpp"

namespace cvaudit::stats {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_binary(const DesignMatrix& design) {
    for (Eigen::Index i = 0; i < design.response.size(); ++i) {
        const double y = design.response[i];
        if (y != 0.0 && y != 1.0)
            throw EstimationError("firth logit requires a binary 0/1 response (found " +
                                  std::to_string(y) + ")");
    }
}

struct State {
    Eigen::VectorXd pi;
    Eigen::VectorXd w;
    Eigen::LLT<Eigen::MatrixXd> info;  // X'WX
    double penalized_ll = 0.0;
};

State evaluate(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    const Eigen::Index n = design.n();
    State s;
    s.pi.resize(n);
    s.w.resize(n);
    double ll = 0.0;
    const Eigen::VectorXd eta = design.X * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double pi = std::clamp(sigmoid(eta[i]), 1e-12, 1.0 - 1e-12);
        s.pi[i] = pi;
        s.w[i] = pi * (1.0 - pi);
        ll += design.response[i] * std::log(pi) + (1.0 - design.response[i]) * std::log(1.0 - pi);
    }
    const Eigen::MatrixXd xtwx =
        design.X.transpose() * s.w.asDiagonal() * design.X;
    s.info.compute(xtwx);
    if (s.info.info() != Eigen::Success)
        throw EstimationError("firth logit: information matrix not positive definite");
    double logdet = 0.0;
    const auto& L = s.info.matrixLLT();
    for (Eigen::Index j = 0; j < L.rows(); ++j) logdet += 2.0 * std::log(L(j, j));
    s.penalized_ll = ll + 0.5 * logdet;
    return s;
}

}  // namespace

double firth_penalized_loglik(const DesignMatrix& design, const Eigen::VectorXd& beta) {
    check_binary(design);
    return evaluate(design, beta).penalized_ll;
}

FitResult fit_firth_logit(const DesignMatrix& design, const FirthOptions& options) {
    check_binary(design);
    design.check_full_rank();
    const Eigen::Index n = design.n();
    const Eigen::Index p = design.p();

    FitResult fit;
    fit.labels.reserve(design.columns.size());
    for (const auto& c : design.columns) fit.labels.push_back(c.label);
    fit.n = n;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    State state = evaluate(design, beta);
    std::vector<double> ll_trace{state.penalized_ll};

    bool converged = false;
    int iter = 0;
    for (; iter < options.max_iterations && !converged; ++iter) {
        // Hat values of the weighted design: h_i = w_i x_i' (X'WX)^-1 x_i.
        const Eigen::MatrixXd solved = state.info.solve(design.X.transpose());  // p x n
        Eigen::VectorXd score(p);
        {
            Eigen::VectorXd adjusted(n);
            for (Eigen::Index i = 0; i < n; ++i) {
                const double h = state.w[i] * design.X.row(i).dot(solved.col(i));
                adjusted[i] = design.response[i] - state.pi[i] + h * (0.5 - state.pi[i]);
            }
            score = design.X.transpose() * adjusted;
        }
        if (score.cwiseAbs().maxCoeff() < options.score_tol) {
            converged = true;
            break;
        }

        Eigen::VectorXd delta = state.info.solve(score);
        State next = evaluate(design, beta + delta);
        int halvings = 0;
        while (next.penalized_ll < state.penalized_ll && halvings < options.max_halvings) {
            delta *= 0.5;
            next = evaluate(design, beta + delta);
            ++halvings;
        }
        if (next.penalized_ll < state.penalized_ll) {
            std::ostringstream msg;
            msg << "firth logit failed to improve after " << options.max_halvings
                << " halvings at iteration " << iter << "; penalized log-likelihood trace:";
            for (double v : ll_trace) msg << " " << v;
            throw EstimationError(msg.str());
        }

        const double change = delta.cwiseAbs().maxCoeff();
        beta += delta;
        state = std::move(next);
        ll_trace.push_back(state.penalized_ll);
        if (change < options.step_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "firth logit did not converge in " << options.max_iterations
            << " iterations; penalized log-likelihood trace:";
        for (double v : ll_trace) msg << " " << v;
        throw EstimationError(msg.str());
    }

    fit.coef = beta;
    fit.iterations = iter + 1;
    fit.fitted = state.pi;
    fit.residuals = design.response - state.pi;
    fit.covariance = state.info.solve(Eigen::MatrixXd::Identity(p, p));
    fit.se.resize(p);
    fit.p_raw.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        fit.se[j] = std::sqrt(fit.covariance(j, j));
        fit.p_raw[j] = fit.se[j] > 0.0 ? 2.0 * norm_sf(std::fabs(beta[j]) / fit.se[j]) : 1.0;
    }
    fit.se_method = "penalized-information";
    return fit;
}

}  // namespace cvaudit::stats
