'''
gravrec
Licensed under a 2 clause BSD license, see COPYING for details

Wall clock + memory accounting for pipeline stages and long sweeps
'''

import time
import psutil


class Benchmark:
    start_time = None
    end_time = None

    def __init__(self, max_items=None):
        self.start_time = time.time()
        self.end_time = None
        self.max_items = max_items
        self.cur_items = 0
        # [(stage name, seconds)]
        self.laps = []
        self._lap_time = self.start_time

    def lap(self, name):
        '''Close the current stage, returns its duration in seconds'''
        now = time.time()
        dt = now - self._lap_time
        self._lap_time = now
        self.laps.append((name, dt))
        return dt

    def stop(self):
        self.end_time = time.time()

    def advance(self, n=1):
        self.cur_items += n

    @staticmethod
    def time_str(delta):
        fraction = delta % 1
        delta = int(delta - fraction)
        seconds = delta % 60
        delta //= 60
        minutes = delta % 60
        hours = delta // 60
        return '%02d:%02d:%02d.%04d' % (hours, minutes, seconds,
                                        fraction * 10000)

    @staticmethod
    def rss_str():
        rss = psutil.Process().memory_info().rss
        return '%0.1f MB rss' % (rss / 1e6, )

    def delta_s(self):
        if self.end_time:
            return self.end_time - self.start_time
        return time.time() - self.start_time

    def eta_s(self):
        '''None until an item completes'''
        if not self.max_items or not self.cur_items:
            return None
        rate = self.cur_items / max(self.delta_s(), 1e-6)
        return (self.max_items - self.cur_items) / rate

    def progress_str(self):
        eta = self.eta_s()
        return '%u / %u, ETA: %s' % (self.cur_items, self.max_items,
                                     'indeterminate'
                                     if eta is None else self.time_str(eta))

    def laps_str(self):
        return ', '.join('%s %0.2fs' % (name, dt) for name, dt in self.laps)

    def __str__(self):
        if self.end_time:
            return '%s (%s)' % (self.time_str(self.end_time -
                                              self.start_time),
                                self.rss_str())
        if self.max_items:
            return self.progress_str()
        return self.time_str(time.time() - self.start_time)
