"""
Sweep metrics calculation functions.
"""

import pandas as pd

from separability import Verdict


def calculate_sweep_metrics(df):
    """Per-epsilon verdict rates and distance statistics of a sweep table"""

    rows = []
    for epsilon, group in df.groupby('epsilon', sort=True):
        verdicts = group['verdict']
        rows.append({
            'epsilon': epsilon,
            'rows': len(group),
            'detection_rate': (verdicts == Verdict.ENTANGLED.value).mean(),
            'inconclusive_rate': (verdicts == Verdict.INCONCLUSIVE.value).mean(),
            'separable_rate': (verdicts == Verdict.SEPARABLE.value).mean(),
            # always < 1 when the pipeline honours its budget
            'max_distance_ratio': (group['achieved_distance'] / epsilon).max(),
            'mean_negativity': group['negativity'].mean(),
            'input_ball_rate': group['input_ball_check'].astype(bool).mean(),
        })

    return pd.DataFrame(rows, columns=['epsilon', 'rows', 'detection_rate', 'inconclusive_rate',
                                       'separable_rate', 'max_distance_ratio',
                                       'mean_negativity', 'input_ball_rate'])


def summarize_sweep(metrics):
    """Print summary statistics of a sweep"""

    print("\n" + "=" * 60)
    print("SWEEP SUMMARY")
    print("=" * 60)

    for _, row in metrics.iterrows():
        print(f"\nepsilon = {row['epsilon']:g} ({int(row['rows'])} samples)")
        print(f"  EntangledCertified: {row['detection_rate'] * 100:.1f}%")
        print(f"  Inconclusive:       {row['inconclusive_rate'] * 100:.1f}%")
        print(f"  SeparableCertified: {row['separable_rate'] * 100:.1f}%")
        print(f"  Max distance / epsilon: {row['max_distance_ratio']:.6f}")
        print(f"  Mean negativity: {row['mean_negativity']:.3e}")
        print(f"  Inputs inside separable ball: {row['input_ball_rate'] * 100:.1f}%")

    print("\n" + "=" * 60)
