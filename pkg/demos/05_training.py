"""Training the 9-512-128-64-7 network on synthetic signatures."""

import numpy as np

from emotiontda import EMOTIONS, TrainConfig, extract_signature, split_dataset, synth_dataset, train
from emotiontda.mlp import accuracy, confusion_matrix, predict

videos = synth_dataset(seed=1, per_class=6)
sigs = [extract_signature(v) for v in videos]
train_set, test_set = split_dataset(sigs, train_n=28, seed=0)
Xtr, ytr = np.array([s.vector for s in train_set]), np.array([s.label for s in train_set])
Xte, yte = np.array([s.vector for s in test_set]), np.array([s.label for s in test_set])

mean, std = Xtr.mean(0), Xtr.std(0) + 1e-12
res = train((Xtr - mean) / std, ytr, TrainConfig(epochs=200, seed=0), (Xte - mean) / std, yte)
print("final train accuracy:", res.history["train_accuracy"][-1])
print("test accuracy:", accuracy(res.params, (Xte - mean) / std, yte))
print("classes:", ", ".join(EMOTIONS))
print(confusion_matrix(yte, predict(res.params, (Xte - mean) / std)))
