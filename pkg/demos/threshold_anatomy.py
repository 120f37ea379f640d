"""How the optimal policies turn a gain spectrum into a transmit threshold.

Samples the empirical distribution of the top channel gain, solves the two
threshold problems on it by hand, and checks the resulting duty cycles
against a simulated run. The budget threshold is a quantile: transmit on the
best p_avg/p_peak fraction of slots. The energy threshold is the largest
cutoff whose tail still averages enough harvest to hit the target.
"""

import wptsim

SAMPLES = 20_000
SLOTS = 8_000


def main():
    cfg = wptsim.ScenarioConfig(
        n_tx=8,
        n_rx=4,
        positions=((0.3, 0.3),),
        slots=SLOTS,
        seed=0,
    )
    spectrum = wptsim.empirical_gain_spectrum(cfg, "sum", SAMPLES, wptsim.warmup_rng(cfg))
    print(f"top-gain spectrum, {spectrum.count} samples:")
    for p in (0.1, 0.5, 0.9):
        print(f"  quantile {p:.1f}: {spectrum.quantile(p):.4e}")
    print()

    # budget rule: duty cycle p_avg / p_peak on the best slots
    params = wptsim.PolicyParams(p_peak=10.0, p_avg=5.0)
    th = wptsim.solve_power_threshold(spectrum, params.p_avg, params.p_peak)
    print(f"budget 5 W of 10 W peak -> threshold {th.lambda_th:.4e}, planned duty {th.achieved_target:.4f}")
    opt = wptsim.run(cfg, params, "optimal-power", warmup_samples=SAMPLES)
    print(f"simulated: duty {opt.duty_cycle:.4f}, spent {opt.avg_transmit_power:.4f} W of 5 W allowed")
    print()

    # energy rule: cheapest slots that still average the required harvest
    target = 0.015
    eth = wptsim.solve_energy_threshold(spectrum, target / cfg.efficiency, params.p_peak)
    print(f"target {1e3 * target} mW -> threshold {eth.lambda_th:.4e}, tail mean {eth.achieved_target:.4e}")
    eparams = wptsim.PolicyParams(p_peak=10.0, p_targets=(target,))
    eopt = wptsim.run(cfg, eparams, "optimal-energy", warmup_samples=SAMPLES)
    print(
        f"simulated: duty {eopt.duty_cycle:.4f}, received {1e3 * eopt.total_received:.3f} mW,"
        f" spent {eopt.avg_transmit_power:.4f} W"
    )


if __name__ == "__main__":
    main()
