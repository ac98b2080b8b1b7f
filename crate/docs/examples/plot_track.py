"""Plot the angle track written by `maslov theorem --format csv`.

    maslov theorem --shape circle:r=1 --format csv --out track.csv
    python plot_track.py track.csv
"""

import sys

import matplotlib.pyplot as plt
import pandas as pd


def main(path):
    df = pd.read_csv(path)
    fig, (ax_rate, ax_circle) = plt.subplots(1, 2, figsize=(10, 4))
    for loop, g in df.groupby("loop"):
        ax_rate.plot(g["t"], g["phase_rate"], label=f"{loop}: winding rate")
        ax_rate.plot(g["t"], g["integrand"], "--", label=f"{loop}: (1/pi) w(H, c')")
        ax_circle.plot(g["det2_re"], g["det2_im"], ".", markersize=2, label=loop)
    ax_rate.set_xlabel("t")
    ax_rate.legend(fontsize="small")
    ax_circle.set_aspect("equal")
    ax_circle.set_title("det² along the loop")
    fig.tight_layout()
    plt.show()


if __name__ == "__main__":
    main(sys.argv[1])
