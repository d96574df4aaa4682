"""Replay exported client-selection schedules in a toy FedAvg loop.

Consumes the simulator's schedule JSON interchange format and measures how
the temporal shape of participation (ramping up, ramping down, flat) moves
held-out loss on a synthetic non-i.i.d. logistic-regression federation.
"""

from .data import (DEFAULT_DIM, DEFAULT_NUM_CLASSES, DOMINANT_MASS,
                   SyntheticFederation, dominant_classes, make_federation)
from .patterns import (PATTERN_KINDS, StudyRow, build_schedule,
                       pattern_counts, pattern_study, save_study_csv,
                       summarize_study)
from .replay import (DEFAULT_LOCAL_EPOCHS, DEFAULT_LR, ReplayResult, Schedule,
                     evaluate, init_weights, load_schedule, local_train,
                     replay)

__all__ = [
    "DEFAULT_DIM", "DEFAULT_LOCAL_EPOCHS", "DEFAULT_LR",
    "DEFAULT_NUM_CLASSES", "DOMINANT_MASS", "PATTERN_KINDS", "ReplayResult",
    "Schedule", "StudyRow", "SyntheticFederation", "build_schedule",
    "dominant_classes", "evaluate", "init_weights", "load_schedule",
    "local_train", "make_federation", "pattern_counts", "pattern_study",
    "replay", "save_study_csv", "summarize_study",
]
