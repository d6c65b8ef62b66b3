#ifndef PACSP_PAC_HPP
#define PACSP_PAC_HPP

#include <optional>
#include <vector>

#include "pacsp/ac3.hpp"
#include "pacsp/csp.hpp"

namespace pacsp {

/// Standard runs the sum/product recurrences on solution probabilities.
/// Boolean runs them over (or, and), which computes arc consistency.
/// Peleg multiplies each belief update by the previous round's belief.
enum class PropagationMode { Standard, Boolean, Peleg };

struct PropagationConfig {
    double epsilon = 1e-5; // convergence threshold on the max per-variable squared-L2 step
    int max_iter = 1000;
    PropagationMode mode = PropagationMode::Standard;
    int oscillation_window = 10; // consecutive rounds of period-2 closeness before declaring
    bool record_history = false;
    double send_delta = 0.0; // keep the old message when it moved at most this much (L-inf)

    void validate() const;
};

enum class PropagationStatus { Converged, MaxIterReached, Oscillating, Wipeout };

struct PropagationResult {
    PropagationStatus status = PropagationStatus::MaxIterReached;
    int iterations = 0;          // completed synchronous rounds
    int oscillation_period = 0;  // 2 when Oscillating
    std::vector<std::vector<double>> beliefs;
    std::vector<double> residual_history;    // per round, vs the previous round
    std::vector<double> alternation_history; // per round, vs two rounds back
    double min_mass = 0.0; // smallest unnormalized belief mass seen (precision diagnostic)
    int wiped_var = -1;

    bool converged() const { return status == PropagationStatus::Converged; }
};

const char* to_string(PropagationStatus s);

/// Full iteration state. Message vectors are stored per undirected edge,
/// one per direction: the message a variable sends describes its own
/// values and has that variable's domain length. sup_lo[e] is the
/// support edge e's lower endpoint receives from the upper one.
struct BeliefState {
    std::vector<std::vector<double>> beliefs;
    std::vector<std::vector<double>> prev_beliefs;
    std::vector<std::vector<double>> prev2_beliefs;
    std::vector<std::vector<double>> msg_from_lo;
    std::vector<std::vector<double>> msg_from_hi;
    std::vector<std::vector<double>> sup_lo;
    std::vector<std::vector<double>> sup_hi;
    int round = 0;
};

/// S(i) = sum_j C(i, j) * msg(j) over x's values, where msg describes y's
/// values. Boolean mode saturates the sum to {0, 1}.
std::vector<double> support_sum(const CspInstance& inst, int x, int y,
                                const std::vector<double>& msg_about_y,
                                PropagationMode mode = PropagationMode::Standard);

struct BeliefUpdate {
    std::vector<double> belief;
    bool wiped = false;
    // Unnormalized total before the alpha step, measured relative to the
    // largest product term (high-degree products are exponent-tracked so
    // they cannot leave double range). A value near 0.5 means a single
    // dominant term.
    double mass = 0.0;
};

/// Normalized product of x's incoming supports (uniform for an isolated
/// variable). Zero total mass is reported as a wipeout, never normalized.
/// `peleg_prev` is the extra previous-belief factor used by Peleg mode.
BeliefUpdate belief_update(const CspInstance& inst, int x,
                           const std::vector<std::vector<double>>& supports,
                           PropagationMode mode = PropagationMode::Standard,
                           const std::vector<double>* peleg_prev = nullptr);

/// Componentwise guarded division: belief / support where the support is
/// positive, 0 elsewhere.
std::vector<double> message_update(const std::vector<double>& belief,
                                   const std::vector<double>& support);

/// Squared-L2 step per variable, and the max over variables.
struct Residual {
    std::vector<double> per_variable;
    double max = 0.0;
};
double vec_residual(const std::vector<double>& f_new, const std::vector<double>& f_old);
Residual residual(const std::vector<std::vector<double>>& f_new,
                  const std::vector<std::vector<double>>& f_old);

/// Synchronous-round engine. All supports are computed from the previous
/// round's messages, then all beliefs, then all messages; summation runs
/// in ascending value and neighbor order so results are reproducible.
/// Each Propagator owns its state; any number of them may run
/// concurrently over the same (immutable) instance.
class Propagator {
public:
    Propagator(const CspInstance& inst, PropagationConfig cfg);

    const BeliefState& state() const { return state_; }
    const CspInstance& instance() const { return *inst_; }

    /// Message describing `from`'s values as consumed by `to`.
    const std::vector<double>& message(int from, int to) const;
    std::vector<double>& mutable_message(int from, int to);
    /// Support `x` receives from neighbor `y` (empty before round 1).
    const std::vector<double>& support(int x, int y) const;

    /// Runs one synchronous round and updates the stop decision.
    /// Returns the status if the run should stop, nullopt to continue.
    std::optional<PropagationStatus> step();

    /// Steps until a stop condition; safe to call after seeding or
    /// rescaling messages by hand.
    PropagationResult run();

private:
    struct DirRef {
        int edge;
        bool from_lo;
    };
    DirRef dir_ref(int from, int to) const;

    const CspInstance* inst_;
    PropagationConfig cfg_;
    BeliefState state_;
    int osc_streak_ = 0;
    int wiped_var_ = -1;
    double min_mass_;
    std::vector<double> residual_history_;
    std::vector<double> alternation_history_;

    PropagationResult make_result(PropagationStatus status) const;
    friend PropagationResult propagate(const CspInstance&, const PropagationConfig&);
};

PropagationResult propagate(const CspInstance& inst, const PropagationConfig& cfg = {});

/// Live sets from a Boolean-mode fixpoint; equals the ac3 domains.
DomainSet boolean_support_sets(const PropagationResult& result);

} // namespace pacsp

#endif
