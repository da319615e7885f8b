"""Train rank-16 adapters on a 64-wide toy network and inspect the checkpoints."""

import tempfile
from pathlib import Path

from chemeval.lora import ToyTrainConfig, cosine_warmup_lr, load_checkpoint, run_demo


def main():
    cfg = ToyTrainConfig(epochs=8, batch_size=16, accumulation_steps=4, learning_rate=1e-2,
                         warmup_ratio=0.1, rank=16, alpha=32.0, checkpoint_interval=4)
    with tempfile.TemporaryDirectory() as tmp:
        report = run_demo(cfg, checkpoint_dir=tmp)
        for line in report.lines():
            print(line)
        print()
        for rec in report.result.log:
            print(f"epoch {rec['epoch']}: step {rec['step']:3d} lr {rec['lr']:.5f} loss {rec['train_loss']:.5f}")
        print()
        for path in report.result.checkpoints:
            manifest, arrays = load_checkpoint(path)
            print(f"{Path(path).name}: step {manifest['step']}, {len(arrays)} tensors, r={manifest['r']}")

    total = report.result.total_steps
    print("\nschedule:", ", ".join(f"{s}:{cosine_warmup_lr(s, total, 0.1, 1.0):.2f}"
                                   for s in range(0, total + 1, max(1, total // 8))))


if __name__ == "__main__":
    main()
