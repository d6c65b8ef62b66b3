#include "pacsp/pac.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pacsp {

void PropagationConfig::validate() const {
    if (!(epsilon > 0.0))
        throw Error("epsilon must be > 0");
    if (max_iter < 1)
        throw Error("max_iter must be >= 1");
    if (oscillation_window < 1)
        throw Error("oscillation_window must be >= 1");
}

const char* to_string(PropagationStatus s) {
    switch (s) {
    case PropagationStatus::Converged: return "converged";
    case PropagationStatus::MaxIterReached: return "max-iter";
    case PropagationStatus::Oscillating: return "oscillating";
    case PropagationStatus::Wipeout: return "wipeout";
    }
    return "unknown";
}

std::vector<double> support_sum(const CspInstance& inst, int x, int y,
                                const std::vector<double>& msg_about_y, PropagationMode mode) {
    const DirectedConstraint c = inst.constraint(x, y); // throws NoSuchEdgeError
    if (static_cast<int>(msg_about_y.size()) != c.cols())
        throw LengthMismatchError("message length does not match neighbor domain");
    std::vector<double> s(static_cast<size_t>(c.rows()), 0.0);
    for (int i = 0; i < c.rows(); ++i) {
        double acc = 0.0;
        for (int j = 0; j < c.cols(); ++j)
            if (c.allows(i, j))
                acc += msg_about_y[j];
        s[i] = (mode == PropagationMode::Boolean) ? (acc > 0.0 ? 1.0 : 0.0) : acc;
    }
    return s;
}

namespace {

BeliefUpdate belief_update_impl(const CspInstance& inst, int x,
                                const std::vector<const std::vector<double>*>& supports,
                                PropagationMode mode, const std::vector<double>* peleg_prev) {
    const int m = inst.domain_size(x);
    for (const auto* s : supports) {
        if (static_cast<int>(s->size()) != m)
            throw LengthMismatchError("support length does not match domain");
        for (double v : *s)
            if (!std::isfinite(v))
                throw NonFiniteError("non-finite support entry", 0);
    }
    BeliefUpdate out;
    out.belief.assign(static_cast<size_t>(m), 0.0);

    if (mode == PropagationMode::Boolean) {
        double mass = 0.0;
        for (int i = 0; i < m; ++i) {
            double prod = inst.value_allowed(x, i) ? 1.0 : 0.0;
            for (const auto* s : supports)
                prod *= (*s)[i];
            out.belief[i] = prod;
            mass += prod;
        }
        out.mass = mass;
        out.wiped = mass == 0.0;
        return out;
    }

    // The product over supports is tracked as mantissa * 2^exponent so
    // that high-degree products cannot leave double range; power-of-two
    // scaling commutes with rounding, so where the naive product stays in
    // range the normalized result is bit-identical.
    std::vector<double> mant(static_cast<size_t>(m), 0.0);
    std::vector<long> expo(static_cast<size_t>(m), 0);
    long top_exp = std::numeric_limits<long>::min();
    for (int i = 0; i < m; ++i) {
        double p = inst.value_allowed(x, i) ? 1.0 : 0.0;
        long e = 0;
        auto fold = [&](double f) {
            p *= f;
            if (p != 0.0) {
                int pe = 0;
                p = std::frexp(p, &pe);
                e += pe;
            }
        };
        for (const auto* s : supports)
            fold((*s)[i]);
        if (mode == PropagationMode::Peleg && peleg_prev)
            fold((*peleg_prev)[i]);
        mant[i] = p;
        expo[i] = e;
        if (p != 0.0)
            top_exp = std::max(top_exp, e);
    }
    if (top_exp == std::numeric_limits<long>::min()) {
        out.wiped = true;
        return out;
    }
    double mass = 0.0;
    for (int i = 0; i < m; ++i) {
        const long shift = expo[i] - top_exp;
        out.belief[i] = shift < -2000 ? 0.0 : std::ldexp(mant[i], static_cast<int>(shift));
        mass += out.belief[i];
    }
    out.mass = mass; // relative to the largest product term; always >= 0.5
    for (double& v : out.belief)
        v /= mass;
    return out;
}

} // namespace

BeliefUpdate belief_update(const CspInstance& inst, int x,
                           const std::vector<std::vector<double>>& supports,
                           PropagationMode mode, const std::vector<double>* peleg_prev) {
    std::vector<const std::vector<double>*> ptrs;
    ptrs.reserve(supports.size());
    for (const auto& s : supports)
        ptrs.push_back(&s);
    return belief_update_impl(inst, x, ptrs, mode, peleg_prev);
}

std::vector<double> message_update(const std::vector<double>& belief,
                                   const std::vector<double>& support) {
    if (belief.size() != support.size())
        throw LengthMismatchError("belief/support length mismatch");
    std::vector<double> msg(belief.size(), 0.0);
    for (size_t i = 0; i < belief.size(); ++i) {
        if (!std::isfinite(belief[i]) || !std::isfinite(support[i]))
            throw NonFiniteError("non-finite message input", 0);
        msg[i] = support[i] > 0.0 ? belief[i] / support[i] : 0.0;
        // A denormal support under a regular belief can overflow the
        // quotient; saturate rather than poison the run.
        if (std::isinf(msg[i]))
            msg[i] = std::numeric_limits<double>::max();
    }
    return msg;
}

double vec_residual(const std::vector<double>& f_new, const std::vector<double>& f_old) {
    if (f_new.size() != f_old.size())
        throw LengthMismatchError("residual vectors differ in length");
    double acc = 0.0;
    for (size_t i = 0; i < f_new.size(); ++i) {
        const double d = f_new[i] - f_old[i];
        acc += d * d;
    }
    return acc;
}

Residual residual(const std::vector<std::vector<double>>& f_new,
                  const std::vector<std::vector<double>>& f_old) {
    if (f_new.size() != f_old.size())
        throw LengthMismatchError("residual states differ in variable count");
    Residual r;
    r.per_variable.reserve(f_new.size());
    for (size_t x = 0; x < f_new.size(); ++x) {
        r.per_variable.push_back(vec_residual(f_new[x], f_old[x]));
        r.max = std::max(r.max, r.per_variable.back());
    }
    return r;
}

Propagator::Propagator(const CspInstance& inst, PropagationConfig cfg)
    : inst_(&inst), cfg_(cfg), min_mass_(std::numeric_limits<double>::infinity()) {
    cfg_.validate();
    const int n = inst.var_count();
    state_.beliefs.resize(n);
    for (int x = 0; x < n; ++x) {
        const int m = inst.domain_size(x);
        if (cfg_.mode == PropagationMode::Boolean)
            state_.beliefs[x].assign(m, 1.0);
        else
            state_.beliefs[x].assign(m, 1.0 / static_cast<double>(m));
    }
    state_.prev_beliefs = state_.beliefs;
    state_.prev2_beliefs = state_.beliefs;
    const int ec = inst.edge_count();
    state_.msg_from_lo.resize(ec);
    state_.msg_from_hi.resize(ec);
    state_.sup_lo.resize(ec);
    state_.sup_hi.resize(ec);
    for (int e = 0; e < ec; ++e) {
        state_.msg_from_lo[e].assign(inst.domain_size(inst.edge(e).a), 1.0);
        state_.msg_from_hi[e].assign(inst.domain_size(inst.edge(e).b), 1.0);
    }
}

Propagator::DirRef Propagator::dir_ref(int from, int to) const {
    for (const auto& nb : inst_->neighbors(from))
        if (nb.var == to)
            return {nb.edge, inst_->edge(nb.edge).a == from};
    throw NoSuchEdgeError("no constraint between " + std::to_string(from) + " and " +
                          std::to_string(to));
}

const std::vector<double>& Propagator::message(int from, int to) const {
    const DirRef d = dir_ref(from, to);
    return d.from_lo ? state_.msg_from_lo[d.edge] : state_.msg_from_hi[d.edge];
}

std::vector<double>& Propagator::mutable_message(int from, int to) {
    const DirRef d = dir_ref(from, to);
    return d.from_lo ? state_.msg_from_lo[d.edge] : state_.msg_from_hi[d.edge];
}

const std::vector<double>& Propagator::support(int x, int y) const {
    const DirRef d = dir_ref(x, y);
    return d.from_lo ? state_.sup_lo[d.edge] : state_.sup_hi[d.edge];
}

std::optional<PropagationStatus> Propagator::step() {
    const CspInstance& inst = *inst_;
    const int n = inst.var_count();
    const int round = state_.round + 1;

    // All supports from the previous round's messages.
    for (int e = 0; e < inst.edge_count(); ++e) {
        const Edge& edge = inst.edge(e);
        state_.sup_lo[e] = support_sum(inst, edge.a, edge.b, state_.msg_from_hi[e], cfg_.mode);
        state_.sup_hi[e] = support_sum(inst, edge.b, edge.a, state_.msg_from_lo[e], cfg_.mode);
    }

    std::swap(state_.prev2_beliefs, state_.prev_beliefs);
    std::swap(state_.prev_beliefs, state_.beliefs);

    // All beliefs from the fresh supports.
    std::vector<const std::vector<double>*> supports;
    for (int x = 0; x < n; ++x) {
        supports.clear();
        for (const auto& nb : inst.neighbors(x)) {
            const Edge& edge = inst.edge(nb.edge);
            supports.push_back(edge.a == x ? &state_.sup_lo[nb.edge] : &state_.sup_hi[nb.edge]);
        }
        BeliefUpdate up;
        try {
            up = belief_update_impl(inst, x, supports, cfg_.mode,
                                    cfg_.mode == PropagationMode::Peleg ? &state_.prev_beliefs[x]
                                                                        : nullptr);
        } catch (const NonFiniteError&) {
            throw NonFiniteError("non-finite state", round);
        }
        if (cfg_.mode != PropagationMode::Boolean)
            min_mass_ = std::min(min_mass_, up.mass);
        if (up.wiped && wiped_var_ < 0)
            wiped_var_ = x;
        state_.beliefs[x] = std::move(up.belief);
    }
    state_.round = round;

    const double r1 = residual(state_.beliefs, state_.prev_beliefs).max;
    const double r2 = residual(state_.beliefs, state_.prev2_beliefs).max;
    if (cfg_.record_history) {
        residual_history_.push_back(r1);
        alternation_history_.push_back(r2);
    }

    if (wiped_var_ >= 0)
        return PropagationStatus::Wipeout;
    if (r1 <= cfg_.epsilon)
        return PropagationStatus::Converged;
    if (round >= 2 && r2 <= cfg_.epsilon)
        ++osc_streak_;
    else
        osc_streak_ = 0;
    if (osc_streak_ >= cfg_.oscillation_window)
        return PropagationStatus::Oscillating;
    if (round >= cfg_.max_iter)
        return PropagationStatus::MaxIterReached;

    // New messages from the fresh beliefs and supports. Message scales
    // drift geometrically round over round (beliefs are normalized,
    // messages are not), so each vector is rescaled by an exact power of
    // two; that leaves every normalized belief bit-identical while
    // keeping magnitudes bounded.
    auto rescale = [](std::vector<double>& msg) {
        double top = 0.0;
        for (double v : msg)
            top = std::max(top, std::abs(v));
        if (top == 0.0)
            return;
        int exp = 0;
        std::frexp(top, &exp);
        if (exp < -8 || exp > 8) {
            const double factor = std::ldexp(1.0, -exp);
            for (double& v : msg)
                v *= factor;
        }
    };
    auto linf = [](const std::vector<double>& a, const std::vector<double>& b) {
        double d = 0.0;
        for (size_t i = 0; i < a.size(); ++i)
            d = std::max(d, std::abs(a[i] - b[i]));
        return d;
    };
    for (int e = 0; e < inst.edge_count(); ++e) {
        const Edge& edge = inst.edge(e);
        auto out_lo = message_update(state_.beliefs[edge.a], state_.sup_lo[e]);
        auto out_hi = message_update(state_.beliefs[edge.b], state_.sup_hi[e]);
        rescale(out_lo);
        rescale(out_hi);
        if (linf(out_lo, state_.msg_from_lo[e]) > cfg_.send_delta)
            state_.msg_from_lo[e] = std::move(out_lo);
        if (linf(out_hi, state_.msg_from_hi[e]) > cfg_.send_delta)
            state_.msg_from_hi[e] = std::move(out_hi);
    }
    return std::nullopt;
}

PropagationResult Propagator::make_result(PropagationStatus status) const {
    PropagationResult r;
    r.status = status;
    r.iterations = state_.round;
    r.oscillation_period = status == PropagationStatus::Oscillating ? 2 : 0;
    r.beliefs = state_.beliefs;
    r.residual_history = residual_history_;
    r.alternation_history = alternation_history_;
    r.min_mass = min_mass_;
    r.wiped_var = wiped_var_;
    return r;
}

PropagationResult Propagator::run() {
    while (true) {
        if (auto status = step())
            return make_result(*status);
    }
}

PropagationResult propagate(const CspInstance& inst, const PropagationConfig& cfg) {
    Propagator p(inst, cfg);
    return p.run();
}

DomainSet boolean_support_sets(const PropagationResult& result) {
    DomainSet d;
    d.live.resize(result.beliefs.size());
    for (size_t x = 0; x < result.beliefs.size(); ++x) {
        d.live[x].resize(result.beliefs[x].size());
        for (size_t v = 0; v < result.beliefs[x].size(); ++v)
            d.live[x][v] = result.beliefs[x][v] > 0.0 ? 1 : 0;
    }
    return d;
}

} // namespace pacsp
