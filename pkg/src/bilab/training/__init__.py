from .adam import Adam
from .dataset import (DatasetReport, SequenceDataset, build_dataset, load_many,
                      split_episode_ids, window_starts)
from .trainer import EpochRecord, TrainConfig, TrainResult, evaluate_mse, train

__all__ = ["Adam", "DatasetReport", "SequenceDataset", "build_dataset",
           "load_many", "split_episode_ids", "window_starts", "EpochRecord",
           "TrainConfig", "TrainResult", "evaluate_mse", "train"]
