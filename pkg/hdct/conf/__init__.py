from hdct.conf import settings

__all__ = ["settings"]
