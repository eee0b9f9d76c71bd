#include "becsim/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "becsim/constants.hpp"
#include "becsim/errors.hpp"
#include "becsim/numerics.hpp"

namespace becsim {

namespace {

double term_value(const PotentialSpec::Term& t, double r, double mass) {
    if (const auto* p = std::get_if<PowerLawTerm>(&t)) {
        return p->u_prime * std::pow(r, 3.0 / p->delta);
    }
    if (const auto* g = std::get_if<GaussianDimpleTerm>(&t)) {
        return -g->depth * std::exp(-2.0 * r * r / (g->waist * g->waist));
    }
    if (const auto* q = std::get_if<QuadrupoleTerm>(&t)) {
        return q->gradient_energy * r;
    }
    const auto& h = std::get<HarmonicTerm>(t);
    return 0.5 * mass * h.omega * h.omega * r * r;
}

double term_second_derivative(const PotentialSpec::Term& t, double r,
                              double mass) {
    if (const auto* p = std::get_if<PowerLawTerm>(&t)) {
        const double e = 3.0 / p->delta;
        if (r == 0.0) return e == 2.0 ? 2.0 * p->u_prime : 0.0;
        return p->u_prime * e * (e - 1.0) * std::pow(r, e - 2.0);
    }
    if (const auto* g = std::get_if<GaussianDimpleTerm>(&t)) {
        const double w2 = g->waist * g->waist;
        const double x = r * r / w2;
        return (4.0 * g->depth / w2) * std::exp(-2.0 * x) * (1.0 - 4.0 * x);
    }
    if (std::get_if<QuadrupoleTerm>(&t)) return 0.0;
    const auto& h = std::get<HarmonicTerm>(t);
    return mass * h.omega * h.omega;
}

// Longest characteristic length of the terms; used to size search windows.
double length_scale(const PotentialSpec& spec) {
    double s = 0.0;
    for (const auto& t : spec.terms) {
        if (const auto* g = std::get_if<GaussianDimpleTerm>(&t)) {
            s = std::max(s, g->waist);
        } else if (const auto* h = std::get_if<HarmonicTerm>(&t)) {
            if (std::isfinite(h->r_edge)) s = std::max(s, h->r_edge);
            if (spec.gravity > 0.0 && h->omega > 0.0) {
                s = std::max(s, 4.0 * spec.gravity / (h->omega * h->omega));
            }
        } else if (const auto* p = std::get_if<PowerLawTerm>(&t)) {
            if (std::isfinite(p->r_edge)) s = std::max(s, p->r_edge);
        }
    }
    return s > 0.0 ? s : 1e-3;
}

double finite_edge(const PotentialSpec& spec) {
    double edge = std::numeric_limits<double>::infinity();
    for (const auto& t : spec.terms) {
        if (const auto* h = std::get_if<HarmonicTerm>(&t)) {
            edge = std::min(edge, h->r_edge);
        } else if (const auto* p = std::get_if<PowerLawTerm>(&t)) {
            edge = std::min(edge, p->r_edge);
        }
    }
    return edge;
}

}  // namespace

void PotentialSpec::validate() const {
    if (terms.empty()) {
        throw std::invalid_argument("potential: no terms");
    }
    for (const auto& t : terms) {
        if (const auto* p = std::get_if<PowerLawTerm>(&t)) {
            if (!(p->u_prime > 0.0) || !(p->delta > 0.0)) {
                throw std::invalid_argument("power law: U' and delta must be > 0");
            }
        } else if (const auto* g = std::get_if<GaussianDimpleTerm>(&t)) {
            if (!(g->depth > 0.0) || !(g->waist > 0.0)) {
                throw std::invalid_argument("dimple: depth and waist must be > 0");
            }
        } else if (const auto* q = std::get_if<QuadrupoleTerm>(&t)) {
            if (!(q->gradient_energy > 0.0)) {
                throw std::invalid_argument("quadrupole: gradient must be > 0");
            }
        } else if (const auto* h = std::get_if<HarmonicTerm>(&t)) {
            if (!(h->omega > 0.0)) {
                throw std::invalid_argument("harmonic: omega must be > 0");
            }
        }
    }
    if ((gravity != 0.0 || !terms.empty()) && mass < 0.0) {
        throw std::invalid_argument("potential: mass must be >= 0");
    }
    for (const auto& t : terms) {
        if (std::holds_alternative<HarmonicTerm>(t) && !(mass > 0.0)) {
            throw std::invalid_argument("harmonic term requires a mass");
        }
    }
    if (gravity != 0.0 && !(mass > 0.0)) {
        throw std::invalid_argument("gravity tilt requires a mass");
    }
}

PotentialSpec power_law(double u_prime, double delta, const AtomSpecies& sp,
                        double r_edge) {
    PotentialSpec s;
    s.terms.push_back(PowerLawTerm{u_prime, delta, r_edge});
    s.mass = sp.mass;
    s.validate();
    return s;
}

PotentialSpec gaussian_dimple(double depth, double waist, const AtomSpecies& sp) {
    PotentialSpec s;
    s.terms.push_back(GaussianDimpleTerm{depth, waist});
    s.mass = sp.mass;
    s.validate();
    return s;
}

PotentialSpec quadrupole(double b_prime, const AtomSpecies& sp) {
    PotentialSpec s;
    s.terms.push_back(QuadrupoleTerm{std::abs(sp.magnetic_moment) * b_prime});
    s.mass = sp.mass;
    s.validate();
    return s;
}

PotentialSpec harmonic(double omega, const AtomSpecies& sp, double r_edge) {
    PotentialSpec s;
    s.terms.push_back(HarmonicTerm{omega, r_edge});
    s.mass = sp.mass;
    s.validate();
    return s;
}

PotentialSpec sum(const PotentialSpec& a, const PotentialSpec& b) {
    if (a.mass != b.mass) {
        throw std::invalid_argument("sum: potentials built for different species");
    }
    if (a.gravity != b.gravity) {
        throw std::invalid_argument("sum: gravity settings disagree");
    }
    PotentialSpec s = a;
    s.terms.insert(s.terms.end(), b.terms.begin(), b.terms.end());
    return s;
}

PotentialSpec with_gravity(PotentialSpec spec, double g) {
    spec.gravity = g;
    spec.validate();
    return spec;
}

double radial_value(const PotentialSpec& spec, double r) {
    double u = 0.0;
    for (const auto& t : spec.terms) u += term_value(t, r, spec.mass);
    return u;
}

double radial_second_derivative(const PotentialSpec& spec, double r) {
    double u = 0.0;
    for (const auto& t : spec.terms) u += term_second_derivative(t, r, spec.mass);
    return u;
}

double potential_value(const PotentialSpec& spec, double rho, double z) {
    const double r = std::hypot(rho, z);
    return radial_value(spec, r) - spec.mass * spec.gravity * z;
}

TrapGeometry analyze_trap(const PotentialSpec& spec, const AtomSpecies& sp) {
    spec.validate();
    const double m = spec.mass > 0.0 ? spec.mass : sp.mass;
    const double g = spec.gravity;
    // Potential along the sag axis (+z is downhill for the -m g z tilt).
    auto phi = [&](double z) { return radial_value(spec, z) - m * g * z; };

    TrapGeometry geo;
    const double edge = finite_edge(spec);
    const double scale = length_scale(spec);

    if (g == 0.0) {
        geo.minimum_position = 0.0;
        geo.minimum_energy = phi(0.0);
        if (std::isfinite(edge)) {
            geo.depth = phi(edge) - geo.minimum_energy;
            geo.r_edge = edge;
        } else {
            // Bounded terms (Gaussian) approach an asymptote; quadrupole and
            // edge-free power laws grow without bound.
            const double far = 1e4 * scale;
            const double u1 = phi(far) - geo.minimum_energy;
            const double u2 = phi(2.0 * far) - geo.minimum_energy;
            geo.depth = (u2 > u1 * (1.0 + 1e-12) + 1e-300)
                            ? std::numeric_limits<double>::infinity()
                            : u1;
        }
    } else {
        // Grid scan for the first local minimum and the barrier beyond it.
        const double z_max = std::isfinite(edge) ? edge : 6.0 * scale;
        const int n = 4000;
        const double dz = z_max / n;
        int i_min = -1;
        double prev = phi(0.0), cur = phi(dz);
        for (int i = 1; i < n; ++i) {
            const double next = phi((i + 1) * dz);
            if (cur <= prev && cur <= next) {
                i_min = i;
                break;
            }
            prev = cur;
            cur = next;
        }
        if (i_min < 0) {
            if (phi(dz) >= phi(0.0)) {
                i_min = 0;  // minimum pinned at the kink (e.g. quadrupole)
            } else {
                throw NoBoundMinimum("analyze_trap: gravity removes the minimum");
            }
        }
        double z_min;
        if (i_min == 0) {
            z_min = 0.0;
        } else {
            z_min = num::golden_min(phi, (i_min - 1) * dz, (i_min + 1) * dz, 1e-9);
        }
        geo.minimum_position = z_min;
        geo.minimum_energy = phi(z_min);

        if (std::isfinite(edge)) {
            geo.depth = phi(edge) - geo.minimum_energy;
            geo.r_edge = edge;
        } else {
            // Barrier: highest point of phi beyond the minimum. An interior
            // local maximum is refined; a still-rising profile at the window
            // end means an unbounded trap.
            int i_best = -1;
            double best = geo.minimum_energy;
            const int i0 = std::max(1, static_cast<int>(z_min / dz) + 1);
            for (int i = i0; i <= n; ++i) {
                const double v = phi(i * dz);
                if (v > best) {
                    best = v;
                    i_best = i;
                }
            }
            if (i_best < 0) {
                throw NoBoundMinimum("analyze_trap: no barrier above the minimum");
            }
            if (i_best >= n) {
                const double u1 = phi(z_max) - geo.minimum_energy;
                const double u2 = phi(2.0 * z_max) - geo.minimum_energy;
                geo.depth = (u2 > u1 * (1.0 + 1e-12))
                                ? std::numeric_limits<double>::infinity()
                                : u1;
            } else {
                auto neg = [&](double z) { return -phi(z); };
                const double z_sad = num::golden_min(
                    neg, (i_best - 1) * dz, (i_best + 1) * dz, 1e-9);
                geo.depth = phi(z_sad) - geo.minimum_energy;
            }
        }
        if (!(geo.depth > 0.0)) {
            throw NoBoundMinimum("analyze_trap: depth <= 0 under gravity");
        }
    }

    const double curv = radial_second_derivative(spec, geo.minimum_position);
    geo.omega_eff = curv > 0.0 ? std::sqrt(curv / m) : 0.0;
    if (!std::isfinite(edge) && std::isfinite(geo.depth) &&
        geo.omega_eff > 0.0 && geo.r_edge == 0.0) {
        // Harmonic-equivalent edge: depth = m omega^2 r_U^2 / 2.
        geo.r_edge = std::sqrt(2.0 * geo.depth / (m * geo.omega_eff * geo.omega_eff));
    }
    return geo;
}

double dimple_frequency_with_gravity(double depth, double waist,
                                     const AtomSpecies& sp, double g,
                                     bool crossed_beams) {
    if (!(depth > 0.0) || !(waist > 0.0) || !(sp.mass > 0.0)) {
        throw std::invalid_argument("dimple_frequency: inputs must be > 0");
    }
    const double crossed = crossed_beams ? std::pow(2.0, 1.0 / 3.0) : 1.0;
    const double base = std::sqrt(4.0 * depth * crossed / (sp.mass * waist * waist));
    const double x = std::sqrt(2.0) * sp.mass * waist * g / depth;
    return base * (0.5 + 0.5 * std::sqrt(1.0 + x));
}

double waist_for_frequency(double omega, double depth, const AtomSpecies& sp,
                           double g) {
    if (!(omega > 0.0) || !(depth > 0.0)) {
        throw std::invalid_argument("waist_for_frequency: inputs must be > 0");
    }
    // omega is monotonically decreasing in the waist.
    auto f = [&](double w) {
        return dimple_frequency_with_gravity(depth, w, sp, g) - omega;
    };
    double lo = 1e-8, hi = 1e-8;
    while (f(hi) > 0.0 && hi < 1.0) hi *= 2.0;
    num::RootOptions opt;
    opt.x_rel_tol = 1e-14;
    return num::find_root(f, lo, hi, opt);
}

}  // namespace becsim
