from django.contrib import admin

from .models import SynthesisRun


@admin.register(SynthesisRun)
class SynthesisRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'kind', 'benchmark', 'engine', 'seed', 'outcome', 'created_at')
    list_filter = ('kind', 'outcome', 'engine')
    search_fields = ('benchmark',)
    readonly_fields = ('report', 'created_at')
