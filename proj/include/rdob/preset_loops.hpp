#pragma once

#include "rdob/augmented_loop.hpp"
#include "rdob/presets.hpp"

namespace rdob::arch {

// Continuous state-space blocks for the stability machinery. Discrete designs
// (the piezo controller and estimating filters) enter through their bilinear
// continuous equivalents; high-order blocks are realized as biquad cascades.
inline num::StateSpace stab_block(const Model& m) {
    return num::tf_to_ss_cascade(m.continuous_equivalent());
}

inline stab::AugmentedLoop build_rdob1_loop(const DesignPreset& p) {
    if (!p.rdob1) throw std::invalid_argument("preset has no config-1 design: " + p.name);
    return stab::augment_rdob1(stab_block(p.dob.plant), p.dob.nominal_inverse,
                               stab_block(p.rdob1->q1), p.rdob1->cglp,
                               stab_block(p.rdob1->q2));
}

inline stab::AugmentedLoop build_rdob2_loop(const DesignPreset& p) {
    if (!p.rdob2) throw std::invalid_argument("preset has no config-2 design: " + p.name);
    return stab::augment_rdob2(stab_block(p.dob.plant), p.dob.nominal_inverse,
                               stab_block(p.dob.q), stab_block(p.rdob2->q_co), p.rdob2->cglp,
                               stab_block(p.rdob2->controller_core));
}

}  // namespace rdob::arch
