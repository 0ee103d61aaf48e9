from .config import AgentConfig
from .ddpg import MaddpgResult, evaluate_policy, train_ddpg, train_maddpg
from .dqn import DqnResult, MadqnResult, evaluate_greedy, greedy_action, train_dqn, train_madqn
from .envs import EnvState, PinchEnv, env_reset, make_env
from .replay import ReplayBuffer, Transition
from .supervised import (
    PositionerDataset,
    PositionerResult,
    predict_position,
    sample_instances,
    train_supervised_positioner,
)

__all__ = [
    "AgentConfig",
    "DqnResult",
    "EnvState",
    "MaddpgResult",
    "MadqnResult",
    "PinchEnv",
    "PositionerDataset",
    "PositionerResult",
    "ReplayBuffer",
    "Transition",
    "env_reset",
    "evaluate_greedy",
    "evaluate_policy",
    "greedy_action",
    "make_env",
    "predict_position",
    "sample_instances",
    "train_ddpg",
    "train_dqn",
    "train_madqn",
    "train_maddpg",
    "train_supervised_positioner",
]
