"""
Command processor interface defining the standard command operation.
"""

from abc import ABC, abstractmethod


class CommandProcessorInterface(ABC):
    """
    Command Processor interface defining standard command operations.
    """

    @abstractmethod
    def execute(self, config) -> dict:
        """
        Process the command

        Args:
            config (RunConfig): Validated run configuration

        Returns:
            dict: JSON-serializable run report with a boolean "pass" entry
        """
        raise NotImplementedError("Subclasses must implement this method")
