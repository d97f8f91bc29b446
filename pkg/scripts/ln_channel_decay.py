"""Numeric L,N energy against its closed-form high-temperature envelope.

Shows the decay rate of the numeric channel in units of the longitudinal and
the transverse suppression exponents.
"""
import math

from phononic_casimir import closedforms as cf
from phononic_casimir.constants import HBAR, KB
from phononic_casimir.lifshitz import LayerStack, energy_ln
from phononic_casimir.materials import default_db, sound_speeds


def main(d=1e-8, temps=(1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0)):
    db = default_db()
    plate, gap = db["Ge"], db["Si"]
    s = sound_speeds(gap)
    print(f"{'T_K':>6}{'x_t':>9}{'e_ln':>13}{'e_ln_T':>13}{'ratio':>11}{'rate/x_l':>10}{'rate/x_t':>10}")
    prev = None
    for T in temps:
        e = energy_ln(LayerStack(plate, gap, d, T))
        env = cf.e_ln_thermal(gap, plate, d, T)
        x_t = cf.ln_suppression_exponent(gap, d, T)
        rates = ("", "")
        if prev is not None:
            dx = 4 * math.pi * KB * (T - prev[0]) * d / HBAR
            rate = math.log(prev[1] / e)
            rates = (f"{rate / (dx / s.c_l):.3f}", f"{rate / (dx / s.c_t):.3f}")
        print(f"{T:6.1f}{x_t:9.2f}{e:13.4e}{env:13.4e}{e / env:11.3g}{rates[0]:>10}{rates[1]:>10}")
        prev = (T, e)


if __name__ == "__main__":
    main()
