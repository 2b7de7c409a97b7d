import argparse
import logging

from ..services import SelftestService

logger = logging.getLogger(__name__)


class SelftestCommandHandler:
    """Handler for `selftest`"""

    def __init__(self):
        self.selftest_service = SelftestService()

    def selftest_command(self, args: argparse.Namespace) -> int:
        results = self.selftest_service.run()
        for result in results:
            mark = "✅" if result.passed else "❌"
            print(f"{mark} {result.name}: {result.detail}")
        failed = sum(1 for r in results if not r.passed)
        print(f"{len(results) - failed}/{len(results)} checks passed")
        return 0 if failed == 0 else 1


selftest_handler = SelftestCommandHandler()
