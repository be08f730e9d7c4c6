"""Kernel errors."""


class KernelError(Exception):
    """Base class for reasoning kernel errors."""


class MalformedTurn(KernelError):
    """A model turn holds no usable code block."""


class HostFailure(KernelError):
    """A host function could not do its job; formal code sees a host-failure error."""
