# Django apps of the Henderson toolkit
