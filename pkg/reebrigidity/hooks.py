from functools import wraps


def _exec_hook(hook_name, self):
    if hasattr(self, hook_name):
        getattr(self, hook_name)()


def hooks(fn):
    """
    Run ``pre_<name>`` and ``post_<name>`` methods of the instance around the
    decorated method, when the instance defines them.

    Constructions use ``post_build`` to verify their defining properties before
    anything downstream sees them.
    """

    @wraps(fn)
    def hooked(self, *args, **kwargs):
        fn_name = getattr(fn, "func_name", fn.__name__)
        _exec_hook("pre_" + fn_name, self)
        val = fn(self, *args, **kwargs)
        _exec_hook("post_" + fn_name, self)
        return val

    return hooked
