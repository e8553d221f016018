"""Regenerates the replay fixtures.

Confusion matrices are read off the F1 levels the study narrates for each
dataset (approximate, eight fractions). Every derived column is computed
here with exact rational arithmetic and rounded half-up to six decimals, so
the files act as an oracle that is independent of the C++ engine.
"""
from decimal import Decimal, ROUND_HALF_UP
from fractions import Fraction
from pathlib import Path

# Industry estimates: minutes per sample, penalties, staffing, product value.
MINUTES = Fraction(1) / 2 * 3 + Fraction(3, 10)
COST_FP, COST_FN, N_HR, C_HR, VALUE = 10_000, 25_000, 10, 70, 4_000_000

FRACTIONS = [Fraction(k, 10) for k in range(1, 9)]

SERIES = {
    # dataset: (N, {technique: F1 per fraction})
    "firefox": (7546, {
        "rf":       [0.55, 0.60, 0.64, 0.67, 0.70, 0.72, 0.75, 0.76],
        "rdc-bert": [0.40, 0.48, 0.58, 0.65, 0.80, 0.83, 0.87, 0.88],
    }),
    "typo3": (2648, {
        "rf":       [0.58, 0.63, 0.67, 0.71, 0.74, 0.77, 0.80, 0.80],
        "rdc-bert": [0.45, 0.55, 0.62, 0.75, 0.78, 0.82, 0.86, 0.87],
    }),
}


def half_up(x):
    return int((x + Fraction(1, 2)).__floor__())


def dec6(x):
    d = Decimal(x.numerator) / Decimal(x.denominator)
    return str(d.quantize(Decimal("0.000001"), rounding=ROUND_HALF_UP))


def row(fraction, n, f1_target):
    n_test = half_up(n * Fraction(1, 5))
    pos = (n_test + 1) // 2
    neg = n_test - pos
    n_train = half_up(n * fraction)
    # Symmetric errors: fp = fn, so F1 = tp / pos.
    tp = half_up(Fraction(f1_target).limit_denominator(1000) * pos)
    fn = pos - tp
    fp = fn
    tn = neg - fp
    precision = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    recall = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    f1 = Fraction(2 * tp, 2 * tp + fp + fn) if tp + fp + fn else Fraction(0)
    cost = (n_train + n_test) * MINUTES * N_HR * C_HR / 60
    penalty = fp * COST_FP + fn * COST_FN
    benefit = VALUE - penalty
    roi = (benefit - cost) / cost
    return [dec6(fraction), n_train, n_test, tp, fp, fn, tn, dec6(precision), dec6(recall), dec6(f1),
            dec6(cost), dec6(Fraction(penalty)), dec6(Fraction(benefit)), dec6(roi)]


HEADER = "fraction,n_train,n_test,tp,fp,fn,tn,precision,recall,f1,cost_usd,penalty_usd,benefit_usd,roi"

if __name__ == "__main__":
    here = Path(__file__).parent
    for dataset, (n, techniques) in SERIES.items():
        for technique, f1s in techniques.items():
            lines = [HEADER] + [",".join(str(v) for v in row(f, n, t)) for f, t in zip(FRACTIONS, f1s)]
            (here / f"{dataset}_{technique}.csv").write_text("\n".join(lines) + "\n")
