#pragma once

#include <variant>

#include "rdob/state_space.hpp"
#include "rdob/transfer_function.hpp"

namespace rdob::num {

// A rational model in either domain, evaluable on a frequency grid. The loop
// algebra in the architecture layer works pointwise on these.
class Model {
public:
    Model() : m_(TransferFunction{}) {}
    Model(TransferFunction tf) : m_(std::move(tf)) {}
    Model(DiscreteTransferFunction dtf) : m_(std::move(dtf)) {}

    static Model gain(double k) { return Model(TransferFunction::gain(k)); }

    bool discrete() const { return std::holds_alternative<DiscreteTransferFunction>(m_); }

    const TransferFunction& ctf() const {
        if (discrete()) throw std::invalid_argument("Model: not continuous");
        return std::get<TransferFunction>(m_);
    }
    const DiscreteTransferFunction& dtf() const {
        if (!discrete()) throw std::invalid_argument("Model: not discrete");
        return std::get<DiscreteTransferFunction>(m_);
    }

    Complex at(double omega) const {
        if (discrete()) return eval_ztf(dtf(), omega);
        return eval_tf(ctf(), omega);
    }

    int relative_degree() const {
        return discrete() ? dtf().relative_degree() : ctf().relative_degree();
    }

    // Continuous rational form: identity for continuous models, inverse
    // bilinear substitution for discrete ones.
    TransferFunction continuous_equivalent() const {
        return discrete() ? d2c_tustin(dtf()) : ctf();
    }

    StateSpace to_ss() const {
        return discrete() ? tf_to_ss(dtf()) : tf_to_ss(ctf());
    }

    friend Model series(const Model& a, const Model& b) {
        if (a.discrete() != b.discrete())
            throw std::invalid_argument("series: mixing continuous and discrete models");
        if (a.discrete()) return Model(series(a.dtf(), b.dtf()));
        return Model(series(a.ctf(), b.ctf()));
    }

private:
    std::variant<TransferFunction, DiscreteTransferFunction> m_;
};

}  // namespace rdob::num
