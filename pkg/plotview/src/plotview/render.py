"""Three result panels from one trajectory CSV.

(a) body angular velocity and control torque components against time,
(b) principal rotation angle and unit axis of each attitude,
(c) instantaneous rotation axis of the angular velocity.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .frames import (TrajectoryFrame, axis_angle_series, load_frame,
                     rotation_axis_series)

_COMPONENTS = ("x", "y", "z")


def _velocity_torque_panel(frame: TrajectoryFrame, path):
    fig, (ax_w, ax_t) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    for i, label in enumerate(_COMPONENTS):
        ax_w.plot(frame.times[:-1], frame.omegas[:, i], label=f"w{label}")
        ax_t.plot(frame.times, frame.torques[:, i], label=f"t{label}")
    ax_w.set_ylabel("angular velocity [rad/s]")
    ax_t.set_ylabel("torque [N m]")
    ax_t.set_xlabel("time [s]")
    for ax in (ax_w, ax_t):
        ax.legend(loc="best", fontsize="small")
        ax.grid(True, alpha=0.3)
    fig.suptitle("Angular velocity and control torques")
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _axis_angle_panel(frame: TrajectoryFrame, path):
    angles, axes = axis_angle_series(frame)
    fig, (ax_a, ax_e) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
    ax_a.plot(frame.times, angles, color="black")
    ax_a.set_ylabel("principal angle [rad]")
    for i, label in enumerate(_COMPONENTS):
        ax_e.plot(frame.times, axes[:, i], label=f"e{label}")
    ax_e.set_ylabel("principal axis")
    ax_e.set_xlabel("time [s]")
    ax_e.set_ylim(-1.1, 1.1)
    ax_e.legend(loc="best", fontsize="small")
    for ax in (ax_a, ax_e):
        ax.grid(True, alpha=0.3)
    fig.suptitle("Principal axis and angle")
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _rotation_axis_panel(frame: TrajectoryFrame, path):
    axes = rotation_axis_series(frame)
    fig, ax = plt.subplots(figsize=(7, 4))
    for i, label in enumerate(_COMPONENTS):
        ax.plot(frame.times[:-1], axes[:, i], label=f"n{label}")
    ax.set_xlabel("time [s]")
    ax.set_ylabel("rotation axis")
    ax.set_ylim(-1.1, 1.1)
    ax.legend(loc="best", fontsize="small")
    ax.grid(True, alpha=0.3)
    fig.suptitle("Instantaneous rotation axis")
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render(csv_path, out_prefix) -> list:
    """Write the three panels; returns the created file paths."""
    frame = load_frame(csv_path)
    targets = [
        (f"{out_prefix}_velocity_torque.png", _velocity_torque_panel),
        (f"{out_prefix}_axis_angle.png", _axis_angle_panel),
        (f"{out_prefix}_rotation_axis.png", _rotation_axis_panel),
    ]
    written = []
    for path, painter in targets:
        painter(frame, path)
        written.append(path)
    return written
