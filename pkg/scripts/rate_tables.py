"""Print the rate-bound comparison tables for the built-in sources."""

from distqc.ensembles import bell_ensemble, erasure_code_ensemble, hidden_orthogonality_ensemble
from distqc.rates import all_bounds, hybrid_rate
from distqc.simulate import hidden_orthogonality_asymptotic_rates


def show(name, ensemble):
    print(f"--- {name} (dA={ensemble.d_a}, dB={ensemble.d_b}, K={ensemble.size}) ---")
    for b in all_bounds(ensemble):
        ra = "-" if b.ra_lb is None else f"{b.ra_lb:.4f}"
        rb = "-" if b.rb_lb is None else f"{b.rb_lb:.4f}"
        flags = b.applicability
        notes = [] if flags.is_product in (None, True) else ["not-product"]
        if flags.is_irreducible_joint is False:
            notes.append("jointly-reducible")
        tag = f"  [{', '.join(notes)}]" if notes else ""
        print(f"  {b.family:13s} RA>={ra:8s} RB>={rb:8s} sum>={b.sum_lb:.4f}{tag}")
    print()


def main():
    show("uniform Bell pairs", bell_ensemble([0.25] * 4))
    show("skewed Bell pairs (1/2,1/4,1/8,1/8)", bell_ensemble([0.5, 0.25, 0.125, 0.125]))
    show("hidden orthogonality (alpha=beta=1e-3)", hidden_orthogonality_ensemble(1e-3, 1e-3))
    show("one-erasure code words", erasure_code_ensemble())

    asym = hidden_orthogonality_asymptotic_rates(1e-3, 1e-3)
    print("hidden-orthogonality achieved rates: "
          f"RA={asym['rate_a']:.4f} RB={asym['rate_b']:.4f} sum={asym['rate_sum']:.4f}")

    hyb = hybrid_rate(0.5, 0.5, 2**-0.5, 2**-0.5, 2**-0.5, 2**-0.5)
    print(f"hybrid strategy at Bell parameters: RA={hyb.rate_a:.4f} RB={hyb.rate_b:.4f}")
    hyb = hybrid_rate(0.5, 0.5, 1.0, 0.0, 2**-0.5, 2**-0.5)
    print(f"hybrid strategy, half-entangled pair: RA={hyb.rate_a:.4f} RB={hyb.rate_b:.4f}")


if __name__ == "__main__":
    main()
