"""Rates with Wilson intervals and a paired comparison of two made-up models."""

from chemeval.stats import (
    cohens_h,
    krippendorff_alpha,
    mcnemar,
    pairwise_comparisons,
    rate_from_counts,
    tost_two_proportions,
    wilson_coverage,
)


def main():
    for k, n in ((487, 500), (963, 1000), (9, 10)):
        est = rate_from_counts(k, n)
        print(f"{k}/{n}: {est.point:.1%} ± {est.half_width:.2%}  [{est.ci_low:.4f}, {est.ci_high:.4f}]")

    stat, p = mcnemar(5, 15)
    print(f"\nMcNemar b=5 c=15: chi2={stat:.2f} p={p:.4f}; exact p={mcnemar(5, 15, 'exact').p:.4f}")
    print(f"Cohen's h(0.5, 0) = {cohens_h(0.5, 0.0):.6f}")
    tost = tost_two_proportions(0.80, 400, 0.78, 400, margin=0.08)
    print(f"TOST 80% vs 78% at ±8%: equivalent={tost.equivalent} p=({tost.p_lower:.4f}, {tost.p_upper:.4f})")

    verdicts = {f"t{i}": {"A": i < 8, "B": i < 6, "C": i % 2 == 0} for i in range(10)}
    print("\npairwise comparisons over 10 tasks:")
    for c in pairwise_comparisons(verdicts):
        print(f"  {c.model_a} vs {c.model_b}: b={c.discordant_ab} c={c.discordant_ba} "
              f"p={c.mcnemar_p:.3f} adjusted={c.adjusted_p:.3f} h={c.cohens_h:+.3f}")

    ratings = [["a", "a"], ["a", "b"], ["b", "b"], ["b", "b"]]
    print(f"\nKrippendorff alpha on four double-coded units: {krippendorff_alpha(ratings):.4f}")
    print(f"simulated Wilson coverage at p=0.9, n=100: {wilson_coverage(0.9, 100, 10_000, seed=0):.4f}")


if __name__ == "__main__":
    main()
