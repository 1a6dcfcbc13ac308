import torch
from typing import Tuple

from finsler_cone.core.config import settings


def get_device() -> str:
    """
    Resolve the torch device used by the differentiation engine.

    Geometry is always evaluated in float64, so MPS (no float64 support)
    falls back to the CPU.

    Returns:
        str: Device string - 'cuda' or 'cpu'
    """
    requested = settings.DEVICE.lower()
    if requested == "cuda" and torch.cuda.is_available():
        return "cuda"
    if requested == "auto" and torch.cuda.is_available():
        return "cuda"
    return "cpu"


def get_device_and_dtype() -> Tuple[str, torch.dtype]:
    """
    Get device and the dtype used for every geometric evaluation.

    Returns:
        Tuple[str, torch.dtype]: Device and float64
    """
    return get_device(), torch.float64


def get_device_info() -> dict:
    """
    Get device information for the `inspect` command.

    Returns:
        dict: Device information including capabilities
    """
    device = get_device()
    info = {
        "device": device,
        "requested": settings.DEVICE,
        "dtype": "float64",
        "torch_version": torch.__version__,
        "threads": torch.get_num_threads(),
        "cuda_available": torch.cuda.is_available(),
    }

    if device == "cuda":
        info.update({
            "cuda_version": torch.version.cuda,
            "gpu_name": torch.cuda.get_device_name(0),
        })

    return info
