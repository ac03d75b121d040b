#pragma once

#include <utility>
#include <vector>

#include "rdob/state_space.hpp"

namespace rdob::stab {

using num::RMat;
using num::StateSpace;

// Assembles a network of SISO blocks with linear signal routing into one
// state-space system. Block inputs are v_i = sum_j gain_ij out_j +
// sum_k wgain_ik w_k; feedthrough loops are resolved by a small linear solve,
// which also detects ill-posed algebraic loops.
class Interconnect {
public:
    explicit Interconnect(std::size_t num_inputs) : num_inputs_(num_inputs) {}

    std::size_t add_block(StateSpace ss) {
        blocks_.push_back(std::move(ss));
        routes_.emplace_back();
        input_routes_.emplace_back();
        return blocks_.size() - 1;
    }

    // out_src * gain feeds the input of dst.
    void connect(std::size_t dst, std::size_t src, double gain) {
        routes_[dst].emplace_back(src, gain);
    }

    // external input w_k * gain feeds the input of dst.
    void connect_input(std::size_t dst, std::size_t input, double gain) {
        input_routes_[dst].emplace_back(input, gain);
    }

    struct Assembled {
        RMat A;                     // n x n closed flow matrix
        std::vector<RMat> B;        // one n x 1 column per external input
        RMat out_x;                 // nb x n: block outputs as functions of x
        RMat out_w;                 // nb x nw: direct feedthrough from inputs
        std::vector<std::pair<std::size_t, std::size_t>> spans;  // offset,size
    };

    Assembled assemble() const {
        const std::size_t nb = blocks_.size();
        std::size_t n = 0;
        std::vector<std::pair<std::size_t, std::size_t>> spans;
        for (const auto& b : blocks_) {
            spans.emplace_back(n, b.order());
            n += b.order();
        }

        RMat gain(nb, nb), wgain(nb, num_inputs_);
        for (std::size_t i = 0; i < nb; ++i) {
            for (const auto& [src, g] : routes_[i]) gain(i, src) += g;
            for (const auto& [k, g] : input_routes_[i]) wgain(i, k) += g;
        }

        RMat cm(nb, n), dm(nb, nb);
        for (std::size_t i = 0; i < nb; ++i) {
            cm.set_block(i, spans[i].first, blocks_[i].C);
            dm(i, i) = blocks_[i].D(0, 0);
        }

        // (I - G D) v = G C x + H w
        RMat loop = RMat::identity(nb) - gain * dm;
        RMat vx, vw;
        try {
            RMat rhs(nb, n + num_inputs_);
            rhs.set_block(0, 0, gain * cm);
            rhs.set_block(0, n, wgain);
            const RMat sol = num::solve(loop, rhs);
            vx = sol.block(0, 0, nb, n);
            vw = sol.block(0, n, nb, num_inputs_);
        } catch (const numeric_error&) {
            throw numeric_error("interconnect: ill-posed algebraic loop");
        }

        Assembled out;
        out.spans = spans;
        out.A = RMat(n, n);
        for (std::size_t i = 0; i < nb; ++i) out.A.set_block(spans[i].first, spans[i].first, blocks_[i].A);
        RMat bm(n, nb);
        for (std::size_t i = 0; i < nb; ++i) bm.set_block(spans[i].first, i, blocks_[i].B);
        out.A = out.A + bm * vx;
        const RMat bw = bm * vw;
        for (std::size_t k = 0; k < num_inputs_; ++k) out.B.push_back(bw.block(0, k, n, 1));
        out.out_x = cm + dm * vx;
        out.out_w = dm * vw;
        return out;
    }

    const StateSpace& block(std::size_t i) const { return blocks_[i]; }
    std::size_t num_inputs() const { return num_inputs_; }

private:
    std::size_t num_inputs_;
    std::vector<StateSpace> blocks_;
    std::vector<std::vector<std::pair<std::size_t, double>>> routes_;
    std::vector<std::vector<std::pair<std::size_t, double>>> input_routes_;
};

}  // namespace rdob::stab
