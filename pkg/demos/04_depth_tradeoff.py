"""The calibrated surrogate: accuracy/latency vs encoding depth, SNR, channel."""
from linksteer.phy import Surrogate

surr = Surrogate.from_file()

print("depth | accuracy@20dB AWGN | accuracy@5dB AWGN | accuracy@20dB Rayleigh | latency (ms)")
for depth in range(1, 13):
    print(
        f"{depth:5d} | {surr.accuracy_at(depth, 20.0, 'AWGN'):18.4f} "
        f"| {surr.accuracy_at(depth, 5.0, 'AWGN'):17.4f} "
        f"| {surr.accuracy_at(depth, 20.0, 'Rayleigh'):22.4f} "
        f"| {surr.latency_at(depth):10.4f}"
    )

print("\ncalibrated operating points are reproduced exactly:")
for depth, expected in ((2, 0.3497), (7, 0.6899), (8, 0.7646), (10, 0.8591), (12, 0.9380)):
    print(f"  accuracy({depth:2d}) = {surr.accuracy_at(depth, 20.0, 'AWGN')} (expected {expected})")
