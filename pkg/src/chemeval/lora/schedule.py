import math

from ..errors import DomainError


def cosine_warmup_lr(step: float, total_steps: int, warmup_ratio: float, peak_lr: float) -> float:
    """Linear warmup to ``peak_lr`` then half-cosine decay to zero.

    >>> cosine_warmup_lr(0, 100, 0.1, 1.0), cosine_warmup_lr(10, 100, 0.1, 1.0)
    (0.0, 1.0)
    """
    if total_steps <= 0:
        raise DomainError("total_steps must be positive")
    if not 0.0 <= warmup_ratio < 1.0:
        raise DomainError(f"warmup_ratio {warmup_ratio} outside [0, 1)")
    if not 0 <= step <= total_steps:
        raise DomainError(f"step {step} outside [0, {total_steps}]")
    warmup = warmup_ratio * total_steps
    if step < warmup:
        return peak_lr * step / warmup
    progress = (step - warmup) / (total_steps - warmup)
    return peak_lr * 0.5 * (1.0 + math.cos(math.pi * progress))
