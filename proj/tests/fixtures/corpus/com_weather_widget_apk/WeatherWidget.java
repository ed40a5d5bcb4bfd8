package com.weather.widget;

import android.appwidget.AppWidgetManager;
import android.appwidget.AppWidgetProvider;
import android.content.Context;
import android.widget.RemoteViews;

public class WeatherWidget extends AppWidgetProvider {
    @Override
    public void onUpdate(Context context, AppWidgetManager manager, int[] ids) {
        for (int id : ids) {
            RemoteViews views = new RemoteViews(context.getPackageName(), R.layout.widget);
            views.setTextViewText(R.id.temperature, formatTemperature(21.5));
            manager.updateAppWidget(id, views);
        }
    }

    static String formatTemperature(double celsius) {
        return String.format("%.1f°", celsius);
    }
}
