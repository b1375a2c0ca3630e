import threading


class ThreadManager:
    """
    Runs a group of handlers, each on its own thread.
    """

    def __init__(self, handlers):
        self.handlers = handlers
        self.threads = []

    def start(self):
        for handler in self.handlers:
            thread = threading.Thread(target=handler.run, name=handler.__class__.__name__)
            self.threads.append(thread)
            thread.start()

    def join(self):
        """Wait until every handler has drained its queue."""
        for thread in self.threads:
            thread.join()

    def stop(self):
        for handler in self.handlers:
            handler.stop_event.set()
        self.join()
