import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from echo_motion.joints import NUM_JOINTS, joint_limits
from echo_motion.motion import FRAME_DIM, AbsoluteTrajectory, MotionClip
from echo_motion.rotation import rot_matrix_to_6d


def random_rotations(n: int, rng: np.random.Generator) -> np.ndarray:
    """(n, 3, 3) uniform random rotation matrices."""
    return Rotation.random(n, random_state=rng).as_matrix()


def random_clip(rng: np.random.Generator, n_frames: int = 40, fps: float = 50.0) -> MotionClip:
    """A structurally valid clip with in-limit joints and decodable rotations."""
    limits = joint_limits()
    mid = limits.mean(axis=1)
    half = (limits[:, 1] - limits[:, 0]) / 2.0
    frames = np.zeros((n_frames, FRAME_DIM))
    frames[:, :NUM_JOINTS] = mid + 0.5 * half * rng.uniform(-1, 1, (n_frames, NUM_JOINTS))
    frames[1:, 29:31] = rng.normal(0.0, 0.005, (n_frames - 1, 2))
    frames[:, 31] = 0.78 + rng.normal(0.0, 0.01, n_frames)
    rots = random_rotations(n_frames, rng)
    frames[:, 32:38] = np.stack([rot_matrix_to_6d(r) for r in rots])
    return MotionClip(frames=frames, fps=fps)


def random_trajectory(rng: np.random.Generator, n_frames: int = 40, fps: float = 50.0) -> AbsoluteTrajectory:
    root_pos = np.cumsum(rng.normal(0.0, 0.01, (n_frames, 3)), axis=0)
    root_pos[:, 2] = 0.78 + rng.normal(0.0, 0.01, n_frames)
    return AbsoluteTrajectory(
        root_pos=root_pos,
        root_rot=random_rotations(n_frames, rng),
        joint_pos=rng.uniform(-1.0, 1.0, (n_frames, NUM_JOINTS)),
        fps=fps,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(0)
