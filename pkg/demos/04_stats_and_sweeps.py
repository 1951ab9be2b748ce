#!/usr/bin/env python3
"""Walkthrough: group statistics, comparisons, and sweep plans.

Feeds published-style group summaries through the pooled t machinery and
shows the CFG / adapter-weight sweep plans used for stability probes.
"""

from cryptidhunt import group_summary, p_from_t, plan_adapter_weight_sweep, plan_cfg_sweep, t_from_summary


def main():
    print("Two-group comparisons from summary statistics")
    print("(mean, sd, n) per group -> pooled t, df, two-tailed p, Cohen's d\n")
    table = [
        ("phonestheme vs random", (0.3709, 0.2997, 200), (0.2087, 0.2837, 100)),
        ("phonestheme vs negative", (0.3709, 0.2997, 200), (0.1412, 0.2556, 50)),
        ("random vs negative", (0.2087, 0.2837, 100), (0.1412, 0.2556, 50)),
    ]
    for label, a, b in table:
        c = t_from_summary(*a, *b)
        print(f"  {label:<26} t={c.t_statistic:6.3f}  df={c.degrees_of_freedom:4.0f}  "
              f"p={c.p_two_tailed:.6f}  d={c.cohens_d:5.3f}")

    print("\nGroup summary of a raw score list [0, 0.5, 1.0]:")
    s = group_summary([0, 0.5, 1.0])
    print(f"  n={s.n} mean={s.mean:.4f} sd={s.sample_sd:.4f} "
          f"median={s.median:.4f} pass={s.pass_count}")

    print("\nTail probabilities, df=298:")
    for t in (1.0, 2.0, 3.0, 4.4973):
        print(f"  p(|T| > {t:<6}) = {p_from_t(t, 298):.6g}")

    print("\nCFG sweep plan (guidance stability probe):")
    cfg = plan_cfg_sweep()
    for job in cfg.jobs[:6]:
        print(f"  {job.tag:<6} seed={job.seed} guidance={job.guidance_scale}")
    print(f"  ... {len(cfg.jobs)} jobs total")

    print("\nAdapter-weight sweep plan (phase-transition probe):")
    weights = plan_adapter_weight_sweep()
    for job in weights.jobs[::3]:
        print(f"  {job.tag:<15} seed={job.seed} weight={job.adapter_weight}")
    print(f"  ... {len(weights.jobs)} jobs total; weight 0.0 rows are the baseline")


if __name__ == "__main__":
    main()
