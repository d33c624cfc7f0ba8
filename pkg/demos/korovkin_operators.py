"""Bernstein operators, a perturbed variant and the Korovkin bound.

Prints the second-moment identity, the decay of the Voronovskaya-type
remainder, the worst slack of the Korovkin inequality and the equi-statistical
evidence for the perturbed operator applied to x^2 + 3x.
"""
import numpy as np

from roughideal import korovkin


def main():
    x = np.linspace(0.0, 1.0, 101)
    for t in (10, 50, 250):
        e2 = korovkin.bernstein_eval(lambda u: u ** 2, t, x)
        err = np.max(np.abs(e2 - (x ** 2 + x * (1 - x) / t)))
        print(f"t = {t:3d}: second-moment identity error {err:.1e}")

    f, fp = korovkin.test_function("e2")
    rep = korovkin.tachev_decay(f, fp, [25, 100, 400])
    print("remainder D_t for e2:", [round(d, 6) for d in rep["D"]], "(expected 1/(4 sqrt t))")

    g, _ = korovkin.test_function("sin_pi")
    bound = korovkin.korovkin_bound_check(g, korovkin.perturbed_bernstein(), range(1, 65),
                                          korovkin.korovkin_grid(), eps=0.1)
    print(f"Korovkin bound for sin(pi x): {len(bound['violations'])} violations, "
          f"min slack {bound['min_slack']:.3g}")

    h, hp = korovkin.test_function("x2_plus_3x")
    adj = korovkin.example_5_3_adjudication(h, hp, j_list=range(1, 201))
    print(f"perturbed operator on x^2 + 3x: g-verdict {adj['verdict']}, "
          f"h-verdict {adj['h_verdict']}, first moments within 1e-10: "
          f"{adj['first_moment_passes']}")


if __name__ == "__main__":
    main()
