from abc import ABC, abstractmethod
from collections.abc import Iterator

from profile_variance_monitor.domain.models.profile import Profile


class ProfileSourcePort(ABC):
    @abstractmethod
    def profiles(self, n: int) -> Iterator[Profile]:
        """
        Yields profiles of exactly ``n`` values in monitoring order, with
        ``index`` set to their 1-based position.

        Raises:
            NotImplementedError: This method must be implemented by concrete adapters
        """
        raise NotImplementedError
