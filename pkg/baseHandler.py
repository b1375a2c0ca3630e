import threading
import logging

logger = logging.getLogger(__name__)


class BaseHandler(threading.Thread):
    """
    Queue worker. Pulls work items from queue_in, runs `process` on each and
    pushes every yielded result to queue_out. `None` is the shutdown sentinel;
    it is forwarded downstream when the worker stops.

    A failing item does not stop the worker: `on_error` may turn it into a
    result record that is pushed in place of the missing output.
    """

    def __init__(self, stop_event, queue_in, queue_out, setup_kwargs=None):
        super().__init__(daemon=True)
        self.stop_event = stop_event
        self.queue_in = queue_in
        self.queue_out = queue_out
        self.setup_kwargs = setup_kwargs or {}
        self.processed = 0
        self.setup(**self.setup_kwargs)

    def setup(self, **kwargs):
        """Optional per-worker initialization."""
        pass

    def process(self, item):
        """Generator yielding zero or more results for one item."""
        raise NotImplementedError

    def on_error(self, item, error):
        return None

    def run(self):
        while not self.stop_event.is_set():
            item = self.queue_in.get()
            if item is None:
                break
            try:
                for out in self.process(item):
                    if out is None:
                        continue
                    self.queue_out.put(out)
            except Exception as e:
                logger.exception(f"{self.__class__.__name__} error: {e}")
                failure = self.on_error(item, e)
                if failure is not None:
                    self.queue_out.put(failure)
            self.processed += 1
        self.queue_out.put(None)
